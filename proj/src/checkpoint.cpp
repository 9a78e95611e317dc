#include "satrrm/checkpoint.hpp"

#include "satrrm/common.hpp"
#include "satrrm/io.hpp"

namespace satrrm::checkpoint {

namespace {

io::json neuron_json(const snn::NeuronParams& np) {
  return {{"tau_syn", np.tau_syn},
          {"tau_mem", np.tau_mem},
          {"threshold", np.threshold},
          {"surrogate_width", np.surrogate_width}};
}

snn::NeuronParams neuron_from_json(const io::json& j) {
  snn::NeuronParams np;
  np.tau_syn = j.at("tau_syn").get<double>();
  np.tau_mem = j.at("tau_mem").get<double>();
  np.threshold = j.at("threshold").get<double>();
  np.surrogate_width = j.at("surrogate_width").get<double>();
  return np;
}

const std::vector<std::uint8_t>& find_block(const io::Blocks& blocks, const std::string& name) {
  for (const auto& [bname, bytes] : blocks)
    if (bname == name) return bytes;
  throw ConfigError("checkpoint is missing block '" + name + "'");
}

}  // namespace

std::string model_kind(const std::filesystem::path& path) {
  io::Blocks blocks;
  const io::json header = io::read_blob(path, &blocks);
  return header.at("model").get<std::string>();
}

void save_snn(const std::filesystem::path& path, const snn::LayeredSnn& net) {
  net.validate();
  io::json header;
  header["format"] = 1;
  header["model"] = "snn";
  header["sizes"] = net.sizes;
  header["neuron"] = io::json::array();
  for (const auto& np : net.neuron) header["neuron"].push_back(neuron_json(np));
  io::Blocks blocks;
  for (std::size_t l = 0; l < net.weights.size(); ++l)
    blocks.emplace_back("w" + std::to_string(l), io::f32_bytes(net.weights[l]));
  io::write_blob(path, std::move(header), blocks);
}

snn::LayeredSnn load_snn(const std::filesystem::path& path) {
  io::Blocks blocks;
  const io::json header = io::read_blob(path, &blocks);
  if (header.at("model").get<std::string>() != "snn")
    throw ConfigError(path.string() + ": not a spiking-network checkpoint");
  snn::LayeredSnn net;
  net.sizes = header.at("sizes").get<std::vector<int>>();
  for (const auto& j : header.at("neuron")) net.neuron.push_back(neuron_from_json(j));
  net.weights.resize(net.neuron.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l)
    net.weights[l] = io::f32_unbytes(find_block(blocks, "w" + std::to_string(l)));
  net.validate();
  return net;
}

void save_cnn(const std::filesystem::path& path, const cnn::CnnModel& model) {
  model.validate();
  const cnn::CnnSpec& s = model.spec;
  io::json header;
  header["format"] = 1;
  header["model"] = "cnn";
  header["spec"] = {{"in_rows", s.in_rows},       {"in_cols", s.in_cols},
                    {"conv1_filters", s.conv1_filters}, {"conv2_filters", s.conv2_filters},
                    {"kernel", s.kernel},         {"pool", s.pool},
                    {"dense1", s.dense1},         {"dense2", s.dense2},
                    {"n_classes", s.n_classes}};
  io::Blocks blocks;
  blocks.emplace_back("conv1_w", io::f32_bytes(model.conv1_w));
  blocks.emplace_back("conv1_b", io::f32_bytes(model.conv1_b));
  blocks.emplace_back("conv2_w", io::f32_bytes(model.conv2_w));
  blocks.emplace_back("conv2_b", io::f32_bytes(model.conv2_b));
  blocks.emplace_back("d1_w", io::f32_bytes(model.d1_w));
  blocks.emplace_back("d1_b", io::f32_bytes(model.d1_b));
  blocks.emplace_back("d2_w", io::f32_bytes(model.d2_w));
  blocks.emplace_back("d2_b", io::f32_bytes(model.d2_b));
  blocks.emplace_back("d3_w", io::f32_bytes(model.d3_w));
  blocks.emplace_back("d3_b", io::f32_bytes(model.d3_b));
  io::write_blob(path, std::move(header), blocks);
}

cnn::CnnModel load_cnn(const std::filesystem::path& path) {
  io::Blocks blocks;
  const io::json header = io::read_blob(path, &blocks);
  if (header.at("model").get<std::string>() != "cnn")
    throw ConfigError(path.string() + ": not a convolutional-network checkpoint");
  const io::json& js = header.at("spec");
  cnn::CnnModel m;
  m.spec.in_rows = js.at("in_rows").get<int>();
  m.spec.in_cols = js.at("in_cols").get<int>();
  m.spec.conv1_filters = js.at("conv1_filters").get<int>();
  m.spec.conv2_filters = js.at("conv2_filters").get<int>();
  m.spec.kernel = js.at("kernel").get<int>();
  m.spec.pool = js.at("pool").get<int>();
  m.spec.dense1 = js.at("dense1").get<int>();
  m.spec.dense2 = js.at("dense2").get<int>();
  m.spec.n_classes = js.at("n_classes").get<int>();
  m.conv1_w = io::f32_unbytes(find_block(blocks, "conv1_w"));
  m.conv1_b = io::f32_unbytes(find_block(blocks, "conv1_b"));
  m.conv2_w = io::f32_unbytes(find_block(blocks, "conv2_w"));
  m.conv2_b = io::f32_unbytes(find_block(blocks, "conv2_b"));
  m.d1_w = io::f32_unbytes(find_block(blocks, "d1_w"));
  m.d1_b = io::f32_unbytes(find_block(blocks, "d1_b"));
  m.d2_w = io::f32_unbytes(find_block(blocks, "d2_w"));
  m.d2_b = io::f32_unbytes(find_block(blocks, "d2_b"));
  m.d3_w = io::f32_unbytes(find_block(blocks, "d3_w"));
  m.d3_b = io::f32_unbytes(find_block(blocks, "d3_b"));
  m.validate();
  return m;
}

}  // namespace satrrm::checkpoint
