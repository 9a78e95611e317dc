#include "satrrm/config.hpp"

#include <algorithm>

#include "satrrm/common.hpp"

namespace satrrm::config {

namespace {

using io::json;

json system_to_json(const linkbudget::SystemParams& s) {
  return {{"carrier_frequency_hz", s.carrier_frequency_hz},
          {"satellite_longitude_deg", s.satellite_longitude_deg},
          {"satellite_altitude_m", s.satellite_altitude_m},
          {"theta_3db_deg", s.theta_3db_deg},
          {"sat_peak_gain_dbi", s.sat_peak_gain_dbi},
          {"rx_gain_over_t_db_per_k", s.rx_gain_over_t_db_per_k},
          {"noise_psd_w_per_hz", s.noise_psd_w_per_hz},
          {"extra_loss_db", s.extra_loss_db}};
}

linkbudget::SystemParams system_from_json(const json& j) {
  linkbudget::SystemParams d;
  d.carrier_frequency_hz = j.value("carrier_frequency_hz", d.carrier_frequency_hz);
  d.satellite_longitude_deg = j.value("satellite_longitude_deg", d.satellite_longitude_deg);
  d.satellite_altitude_m = j.value("satellite_altitude_m", d.satellite_altitude_m);
  d.theta_3db_deg = j.value("theta_3db_deg", d.theta_3db_deg);
  d.sat_peak_gain_dbi = j.value("sat_peak_gain_dbi", d.sat_peak_gain_dbi);
  d.rx_gain_over_t_db_per_k = j.value("rx_gain_over_t_db_per_k", d.rx_gain_over_t_db_per_k);
  d.noise_psd_w_per_hz = j.value("noise_psd_w_per_hz", d.noise_psd_w_per_hz);
  d.extra_loss_db = j.value("extra_loss_db", d.extra_loss_db);
  return d;
}

json beams_to_json(const std::vector<linkbudget::Beam>& beams) {
  json arr = json::array();
  for (const auto& b : beams)
    arr.push_back({{"id", b.id}, {"lat", b.center_lat_deg}, {"lon", b.center_lon_deg}});
  return arr;
}

std::vector<linkbudget::Beam> beams_from_json(const json& arr) {
  std::vector<linkbudget::Beam> beams;
  for (const auto& j : arr)
    beams.push_back({j.at("id").get<int>(), j.at("lat").get<double>(),
                     j.at("lon").get<double>()});
  return beams;
}

}  // namespace

void DatasetParams::validate() const {
  if (samples <= 0) throw ConfigError("sample count must be positive");
  if (!(train_frac > 0.0) || !(val_frac >= 0.0) || !(train_frac + val_frac < 1.0))
    throw ConfigError("split fractions must leave room for a test split");
}

void LabelParams::validate() const {
  if (!(p_max_w > 0.0) || !(w_max_hz > 0.0))
    throw ConfigError("resource constraints must be positive");
  weights.validate();
  if (!(min_support >= 0.0 && min_support < 1.0))
    throw ConfigError("min_support must be in [0, 1)");
}

void EncoderParams::validate() const {
  if (kind != "tem" && kind != "rate")
    throw ConfigError("encoder kind must be 'tem' or 'rate'");
  if (steps <= 0) throw ConfigError("encoder steps must be positive");
  preprocess.validate();
  tem.validate();
}

void SnnParams::validate() const {
  if (hidden.empty()) throw ConfigError("network needs at least one hidden layer");
  for (int h : hidden)
    if (h <= 0) throw ConfigError("hidden layer sizes must be positive");
  neuron.validate();
  hyper.validate();
}

void CnnParams::validate() const {
  preprocess.validate();
  if (conv1_filters <= 0 || conv2_filters <= 0 || kernel <= 0 || pool <= 0 ||
      dense1 <= 0 || dense2 <= 0)
    throw ConfigError("network layer sizes must be positive");
  hyper.validate();
}

void RunConfig::validate() const {
  system.validate();
  linkbudget::validate_beams(beams);
  if (table_mode != "reference" && table_mode != "analytic")
    throw ConfigError("table_mode must be 'reference' or 'analytic'");
  if (!(modcod_margin_db >= 0.0)) throw ConfigError("modcod margin must be non-negative");
  if (powers_dbw.empty() || bandwidths_hz.empty())
    throw ConfigError("power and bandwidth grids must be non-empty");
  traffic.validate();
  dataset.validate();
  label.validate();
  encoder.validate();
  snn.validate();
  cnn.validate();
}

linkbudget::ModCodTable RunConfig::modcod() const {
  return linkbudget::modcod_from_capacity_rows(linkbudget::reference_capacity_table(),
                                               modcod_margin_db);
}

linkbudget::CapacityTable RunConfig::capacity_table() const {
  const linkbudget::ModCodTable mc = modcod();
  if (table_mode == "reference") {
    return linkbudget::build_capacity_table(powers_dbw, bandwidths_hz,
                                            linkbudget::TableMode::kReference, system,
                                            beams.front(), mc);
  }
  const linkbudget::CapacityTable ref = linkbudget::reference_capacity_table();
  const int anchor = ref.find(calib_power_dbw, calib_bandwidth_hz);
  if (anchor < 0) throw ConfigError("calibration anchor is not a reference table row");
  linkbudget::SystemParams sys = system;
  sys.extra_loss_db = linkbudget::fit_extra_loss_db(sys, beams.front(), calib_power_dbw,
                                                    calib_bandwidth_hz,
                                                    ref.rows[anchor].cinr_db);
  return linkbudget::build_capacity_table(powers_dbw, bandwidths_hz,
                                          linkbudget::TableMode::kAnalytic, sys,
                                          beams.front(), mc);
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.beams = linkbudget::default_beams();
  cfg.traffic = traffic::default_model();
  return cfg;
}

io::json to_json(const RunConfig& cfg) {
  json j;
  j["threads"] = cfg.threads;
  j["system"] = system_to_json(cfg.system);
  j["beams"] = beams_to_json(cfg.beams);
  j["capacity"] = {{"mode", cfg.table_mode},
                   {"modcod_margin_db", cfg.modcod_margin_db},
                   {"powers_dbw", cfg.powers_dbw},
                   {"bandwidths_hz", cfg.bandwidths_hz},
                   {"calib_power_dbw", cfg.calib_power_dbw},
                   {"calib_bandwidth_hz", cfg.calib_bandwidth_hz}};
  j["traffic"] = traffic::model_to_json(cfg.traffic);
  j["dataset"] = {{"samples", cfg.dataset.samples},
                  {"train_frac", cfg.dataset.train_frac},
                  {"val_frac", cfg.dataset.val_frac},
                  {"seed", cfg.dataset.seed}};
  j["label"] = {{"p_max_w", cfg.label.p_max_w},
                {"w_max_hz", cfg.label.w_max_hz},
                {"beta0_per_bps", cfg.label.weights.beta0_per_bps},
                {"beta1_per_w", cfg.label.weights.beta1_per_w},
                {"beta2_per_hz", cfg.label.weights.beta2_per_hz},
                {"min_support", cfg.label.min_support},
                {"threads", cfg.label.threads}};
  j["encoder"] = {{"kind", cfg.encoder.kind},
                  {"steps", cfg.encoder.steps},
                  {"percentile", cfg.encoder.preprocess.percentile},
                  {"pool_stride", cfg.encoder.preprocess.pool_stride},
                  {"tem_alpha_u", cfg.encoder.tem.alpha_u},
                  {"tem_alpha_v", cfg.encoder.tem.alpha_v},
                  {"tem_threshold", cfg.encoder.tem.threshold},
                  {"tem_replicas", cfg.encoder.tem.replicas},
                  {"rate_seed", cfg.encoder.rate_seed}};
  j["snn"] = {{"hidden", cfg.snn.hidden},
              {"tau_syn", cfg.snn.neuron.tau_syn},
              {"tau_mem", cfg.snn.neuron.tau_mem},
              {"threshold", cfg.snn.neuron.threshold},
              {"surrogate_width", cfg.snn.neuron.surrogate_width},
              {"rho", cfg.snn.hyper.rho},
              {"rho_f", cfg.snn.hyper.rho_f},
              {"epochs", cfg.snn.hyper.epochs},
              {"batch", cfg.snn.hyper.batch},
              {"lr", cfg.snn.hyper.lr},
              {"seed", cfg.snn.hyper.seed}};
  j["cnn"] = {{"percentile", cfg.cnn.preprocess.percentile},
              {"pool_stride", cfg.cnn.preprocess.pool_stride},
              {"conv1_filters", cfg.cnn.conv1_filters},
              {"conv2_filters", cfg.cnn.conv2_filters},
              {"kernel", cfg.cnn.kernel},
              {"pool", cfg.cnn.pool},
              {"dense1", cfg.cnn.dense1},
              {"dense2", cfg.cnn.dense2},
              {"lr", cfg.cnn.hyper.lr},
              {"momentum", cfg.cnn.hyper.momentum},
              {"nesterov", cfg.cnn.hyper.nesterov},
              {"epochs", cfg.cnn.hyper.epochs},
              {"batch", cfg.cnn.hyper.batch},
              {"patience", cfg.cnn.hyper.patience},
              {"loss", cfg.cnn.hyper.loss == cnn::Loss::kCrossEntropy ? "ce" : "mse"},
              {"seed", cfg.cnn.hyper.seed}};
  return j;
}

RunConfig from_json(const io::json& j) {
  RunConfig cfg = default_config();
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("system")) cfg.system = system_from_json(j.at("system"));
  if (j.contains("beams")) cfg.beams = beams_from_json(j.at("beams"));
  if (j.contains("capacity")) {
    const json& c = j.at("capacity");
    cfg.table_mode = c.value("mode", cfg.table_mode);
    cfg.modcod_margin_db = c.value("modcod_margin_db", cfg.modcod_margin_db);
    if (c.contains("powers_dbw")) cfg.powers_dbw = c.at("powers_dbw").get<std::vector<double>>();
    if (c.contains("bandwidths_hz"))
      cfg.bandwidths_hz = c.at("bandwidths_hz").get<std::vector<double>>();
    cfg.calib_power_dbw = c.value("calib_power_dbw", cfg.calib_power_dbw);
    cfg.calib_bandwidth_hz = c.value("calib_bandwidth_hz", cfg.calib_bandwidth_hz);
  }
  if (j.contains("traffic")) cfg.traffic = traffic::model_from_json(j.at("traffic"));
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    cfg.dataset.samples = d.value("samples", cfg.dataset.samples);
    cfg.dataset.train_frac = d.value("train_frac", cfg.dataset.train_frac);
    cfg.dataset.val_frac = d.value("val_frac", cfg.dataset.val_frac);
    cfg.dataset.seed = d.value("seed", cfg.dataset.seed);
  }
  if (j.contains("label")) {
    const json& l = j.at("label");
    cfg.label.p_max_w = l.value("p_max_w", cfg.label.p_max_w);
    cfg.label.w_max_hz = l.value("w_max_hz", cfg.label.w_max_hz);
    cfg.label.weights.beta0_per_bps = l.value("beta0_per_bps", cfg.label.weights.beta0_per_bps);
    cfg.label.weights.beta1_per_w = l.value("beta1_per_w", cfg.label.weights.beta1_per_w);
    cfg.label.weights.beta2_per_hz = l.value("beta2_per_hz", cfg.label.weights.beta2_per_hz);
    cfg.label.min_support = l.value("min_support", cfg.label.min_support);
    cfg.label.threads = l.value("threads", cfg.label.threads);
  }
  if (j.contains("encoder")) {
    const json& e = j.at("encoder");
    cfg.encoder.kind = e.value("kind", cfg.encoder.kind);
    cfg.encoder.steps = e.value("steps", cfg.encoder.steps);
    cfg.encoder.preprocess.percentile = e.value("percentile", cfg.encoder.preprocess.percentile);
    cfg.encoder.preprocess.pool_stride =
        e.value("pool_stride", cfg.encoder.preprocess.pool_stride);
    cfg.encoder.tem.alpha_u = e.value("tem_alpha_u", cfg.encoder.tem.alpha_u);
    cfg.encoder.tem.alpha_v = e.value("tem_alpha_v", cfg.encoder.tem.alpha_v);
    cfg.encoder.tem.threshold = e.value("tem_threshold", cfg.encoder.tem.threshold);
    cfg.encoder.tem.replicas = e.value("tem_replicas", cfg.encoder.tem.replicas);
    cfg.encoder.rate_seed = e.value("rate_seed", cfg.encoder.rate_seed);
  }
  if (j.contains("snn")) {
    const json& s = j.at("snn");
    if (s.contains("hidden")) cfg.snn.hidden = s.at("hidden").get<std::vector<int>>();
    cfg.snn.neuron.tau_syn = s.value("tau_syn", cfg.snn.neuron.tau_syn);
    cfg.snn.neuron.tau_mem = s.value("tau_mem", cfg.snn.neuron.tau_mem);
    cfg.snn.neuron.threshold = s.value("threshold", cfg.snn.neuron.threshold);
    cfg.snn.neuron.surrogate_width = s.value("surrogate_width", cfg.snn.neuron.surrogate_width);
    cfg.snn.hyper.rho = s.value("rho", cfg.snn.hyper.rho);
    cfg.snn.hyper.rho_f = s.value("rho_f", cfg.snn.hyper.rho_f);
    cfg.snn.hyper.epochs = s.value("epochs", cfg.snn.hyper.epochs);
    cfg.snn.hyper.batch = s.value("batch", cfg.snn.hyper.batch);
    cfg.snn.hyper.lr = s.value("lr", cfg.snn.hyper.lr);
    cfg.snn.hyper.seed = s.value("seed", cfg.snn.hyper.seed);
  }
  if (j.contains("cnn")) {
    const json& c = j.at("cnn");
    cfg.cnn.preprocess.percentile = c.value("percentile", cfg.cnn.preprocess.percentile);
    cfg.cnn.preprocess.pool_stride = c.value("pool_stride", cfg.cnn.preprocess.pool_stride);
    cfg.cnn.conv1_filters = c.value("conv1_filters", cfg.cnn.conv1_filters);
    cfg.cnn.conv2_filters = c.value("conv2_filters", cfg.cnn.conv2_filters);
    cfg.cnn.kernel = c.value("kernel", cfg.cnn.kernel);
    cfg.cnn.pool = c.value("pool", cfg.cnn.pool);
    cfg.cnn.dense1 = c.value("dense1", cfg.cnn.dense1);
    cfg.cnn.dense2 = c.value("dense2", cfg.cnn.dense2);
    cfg.cnn.hyper.lr = c.value("lr", cfg.cnn.hyper.lr);
    cfg.cnn.hyper.momentum = c.value("momentum", cfg.cnn.hyper.momentum);
    cfg.cnn.hyper.nesterov = c.value("nesterov", cfg.cnn.hyper.nesterov);
    cfg.cnn.hyper.epochs = c.value("epochs", cfg.cnn.hyper.epochs);
    cfg.cnn.hyper.batch = c.value("batch", cfg.cnn.hyper.batch);
    cfg.cnn.hyper.patience = c.value("patience", cfg.cnn.hyper.patience);
    const std::string loss = c.value("loss", std::string("ce"));
    if (loss == "ce")
      cfg.cnn.hyper.loss = cnn::Loss::kCrossEntropy;
    else if (loss == "mse")
      cfg.cnn.hyper.loss = cnn::Loss::kSquaredError;
    else
      throw ConfigError("cnn loss must be 'ce' or 'mse'");
    cfg.cnn.hyper.seed = c.value("seed", cfg.cnn.hyper.seed);
  }
  cfg.validate();
  return cfg;
}

RunConfig load(const std::filesystem::path& path) {
  return from_json(io::read_json_file(path));
}

void save(const std::filesystem::path& path, const RunConfig& cfg) {
  io::write_json_file(path, to_json(cfg));
}

}  // namespace satrrm::config
