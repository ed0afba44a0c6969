#include "depsvm/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace depsvm {

namespace {

// tracks which keys/subtables were consumed so unknown ones can be rejected
class Reader {
 public:
  Reader(const toml::Table& t, std::string context) : t_(t), context_(std::move(context)) {}

  bool has(const std::string& key) {
    return t_.values.count(key) > 0;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    used_.insert(key);
    return t_.at(key).as_number();
  }

  double require_number(const std::string& key) {
    if (!has(key)) missing(key);
    used_.insert(key);
    return t_.at(key).as_number();
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, fallback);
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-9)
      throw std::invalid_argument(context_ + "." + key + ": expected an integer");
    return i;
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    used_.insert(key);
    return t_.at(key).as_string();
  }

  std::string require_string(const std::string& key) {
    if (!has(key)) missing(key);
    used_.insert(key);
    return t_.at(key).as_string();
  }

  std::vector<double> number_list(const std::string& key) {
    if (!has(key)) missing(key);
    used_.insert(key);
    std::vector<double> out;
    for (const toml::Value& v : t_.at(key).as_array()) out.push_back(v.as_number());
    return out;
  }

  std::vector<std::vector<double>> matrix(const std::string& key) {
    if (!has(key)) missing(key);
    used_.insert(key);
    std::vector<std::vector<double>> out;
    for (const toml::Value& row : t_.at(key).as_array()) {
      std::vector<double> r;
      for (const toml::Value& v : row.as_array()) r.push_back(v.as_number());
      out.push_back(std::move(r));
    }
    return out;
  }

  const toml::Table* subtable(const std::string& name) {
    used_tables_.insert(name);
    return t_.table(name);
  }

  void finish() {
    for (const auto& [key, value] : t_.values)
      if (!used_.count(key))
        throw std::invalid_argument(context_ + ": unknown key '" + key + "' (line " +
                                    std::to_string(value.line) + ")");
    for (const auto& [name, sub] : t_.tables)
      if (!used_tables_.count(name))
        throw std::invalid_argument(context_ + ": unknown table '" + name + "' (line " +
                                    std::to_string(sub.line) + ")");
  }

 private:
  [[noreturn]] void missing(const std::string& key) {
    throw std::invalid_argument(context_ + ": missing required key '" + key + "'");
  }

  const toml::Table& t_;
  std::string context_;
  std::set<std::string> used_;
  std::set<std::string> used_tables_;
};

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

Eigen::MatrixXd to_mat(const std::vector<std::vector<double>>& m, const std::string& what) {
  if (m.empty()) throw std::invalid_argument(what + ": empty matrix");
  const std::size_t cols = m[0].size();
  for (const auto& row : m)
    if (row.size() != cols) throw std::invalid_argument(what + ": ragged rows");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
  return out;
}

LabelModel parse_label(const toml::Table* lt, const std::string& context) {
  if (!lt) throw std::invalid_argument(context + ".label: missing");
  Reader r(*lt, context + ".label");
  const std::string kind = r.require_string("kind");
  if (kind == "classification") {
    ClassificationLabel c;
    if (r.has("eta")) {
      c.eta = r.number_list("eta");
    } else {
      c.p_left = r.number("p_left", 0.5);
      c.p_right = r.number("p_right", 0.5);
      c.threshold = r.number("threshold", 0.0);
    }
    r.finish();
    return c;
  }
  if (kind == "regression") {
    RegressionLabel reg;
    reg.mean = MeanFunction::from_name(r.string("mean", "zero"), r.number("mean_a", 1.0),
                                       r.number("mean_b", 1.0));
    const std::string noise = r.string("noise", "gaussian");
    if (noise == "gaussian") reg.noise.kind = NoiseSpec::Kind::Gaussian;
    else if (noise == "student_t") reg.noise.kind = NoiseSpec::Kind::StudentT;
    else throw std::invalid_argument(context + ".label.noise: unknown kind '" + noise + "'");
    reg.noise.scale = r.number("noise_scale", 1.0);
    reg.noise.dof = r.integer("dof", 5);
    reg.noise.q = r.number("q", 2.0);
    r.finish();
    return reg;
  }
  throw std::invalid_argument(context + ".label.kind: unknown kind '" + kind + "'");
}

ProcessSpec parse_process(const toml::Table* pt, std::vector<std::string>& warnings) {
  if (!pt) throw std::invalid_argument("process: missing table");
  Reader r(*pt, "process");
  const std::string kind = r.require_string("kind");
  const LabelModel label = parse_label(r.subtable("label"), "process");

  ProcessSpec spec;
  if (kind == "markov_chain") {
    MarkovChainSpec mc;
    mc.trans = to_mat(r.matrix("trans"), "process.trans");
    mc.init = to_vec(r.number_list("init"));
    if (r.has("features")) {
      mc.features = to_mat(r.matrix("features"), "process.features");
    } else {
      // default 1-d feature map: the state index
      mc.features.resize(mc.trans.rows(), 1);
      for (Eigen::Index s = 0; s < mc.trans.rows(); ++s) mc.features(s, 0) = static_cast<double>(s);
    }
    mc.label = label;
    spec.variant = mc;
    r.finish();
    spec.validate();
    if (!has_positive_power(std::get<MarkovChainSpec>(spec.variant),
                            mc.states() * mc.states() + 1))
      warnings.push_back(
          "process.trans: no power is strictly positive; the chain may not mix");
    return spec;
  }
  if (kind == "ar1") {
    Ar1Spec ar;
    ar.rho = r.require_number("rho");
    ar.noise_sd = r.require_number("noise_sd");
    ar.label = label;
    spec.variant = ar;
    r.finish();
    spec.validate();
    return spec;
  }
  if (kind == "noisy_doubling") {
    NoisyDoublingSpec nd;
    nd.noise_sd = r.require_number("noise_sd");
    nd.label = label;
    spec.variant = nd;
    r.finish();
    spec.validate();
    return spec;
  }
  if (kind == "iid") {
    IidSpec iid;
    if (r.has("box_lo") || r.has("box_hi")) {
      UniformBox box;
      box.lo = to_vec(r.number_list("box_lo"));
      box.hi = to_vec(r.number_list("box_hi"));
      iid.x_dist = box;
    } else {
      GaussianMixture1d gm;
      gm.weights = r.number_list("mix_weights");
      gm.means = r.number_list("mix_means");
      gm.sds = r.number_list("mix_sds");
      iid.x_dist = gm;
    }
    iid.label = label;
    spec.variant = iid;
    r.finish();
    spec.validate();
    return spec;
  }
  throw std::invalid_argument("process.kind: unknown kind '" + kind + "'");
}

LossSpec parse_loss(const toml::Table* lt) {
  if (!lt) throw std::invalid_argument("loss: missing table");
  Reader r(*lt, "loss");
  const std::string kind = r.require_string("kind");
  double param = 0.0;
  if (kind == "eps_insensitive") param = r.number("epsilon", 0.1);
  if (kind == "huber") param = r.number("delta", 1.0);
  std::optional<Interval> y_range;
  if (r.has("y_lo") || r.has("y_hi")) {
    Interval iv;
    iv.lo = r.require_number("y_lo");
    iv.hi = r.require_number("y_hi");
    y_range = iv;
  }
  LossSpec loss = LossSpec::from_name(kind, param, y_range);
  r.finish();
  return loss;
}

KernelSpec parse_kernel(const toml::Table* kt, int input_dim) {
  if (!kt) return KernelSpec::gaussian(1.0, input_dim);
  Reader r(*kt, "kernel");
  const std::string kind = r.string("kind", "gaussian");
  KernelSpec k = KernelSpec::from_name(kind, input_dim, r.number("sigma", 1.0),
                                       r.integer("degree", 2), r.number("offset", 1.0));
  r.finish();
  return k;
}

toml::Value num_value(double v) {
  toml::Value out;
  out.data = v;
  return out;
}

toml::Value str_value(const std::string& s) {
  toml::Value out;
  out.data = s;
  return out;
}

toml::Value list_value(const std::vector<double>& v) {
  toml::Array arr;
  for (double x : v) arr.push_back(num_value(x));
  toml::Value out;
  out.data = std::move(arr);
  return out;
}

toml::Value matrix_value(const Eigen::MatrixXd& m) {
  toml::Array rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    toml::Array row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num_value(m(i, j)));
    toml::Value rv;
    rv.data = std::move(row);
    rows.push_back(std::move(rv));
  }
  toml::Value out;
  out.data = std::move(rows);
  return out;
}

// echo of the fully resolved configuration, defaults included
toml::Table resolve_echo(const ResolvedConfig& rc) {
  const ExperimentConfig& e = rc.experiment;
  toml::Table doc;
  doc.values["name"] = str_value(e.name);

  toml::Table& p = doc.tables["process"];
  p.values["kind"] = str_value(e.process.name());
  if (const auto* mc = e.process.chain()) {
    p.values["trans"] = matrix_value(mc->trans);
    p.values["init"] = list_value(std::vector<double>(mc->init.data(), mc->init.data() + mc->init.size()));
    p.values["features"] = matrix_value(mc->features);
  } else if (const auto* ar = std::get_if<Ar1Spec>(&e.process.variant)) {
    p.values["rho"] = num_value(ar->rho);
    p.values["noise_sd"] = num_value(ar->noise_sd);
  } else if (const auto* nd = std::get_if<NoisyDoublingSpec>(&e.process.variant)) {
    p.values["noise_sd"] = num_value(nd->noise_sd);
  } else {
    const auto& iid = std::get<IidSpec>(e.process.variant);
    if (const auto* box = std::get_if<UniformBox>(&iid.x_dist)) {
      p.values["box_lo"] = list_value(std::vector<double>(box->lo.data(), box->lo.data() + box->lo.size()));
      p.values["box_hi"] = list_value(std::vector<double>(box->hi.data(), box->hi.data() + box->hi.size()));
    } else {
      const auto& gm = std::get<GaussianMixture1d>(iid.x_dist);
      p.values["mix_weights"] = list_value(gm.weights);
      p.values["mix_means"] = list_value(gm.means);
      p.values["mix_sds"] = list_value(gm.sds);
    }
  }
  toml::Table& lbl = p.tables["label"];
  if (const auto* c = std::get_if<ClassificationLabel>(&e.process.label())) {
    lbl.values["kind"] = str_value("classification");
    if (c->tabular()) {
      lbl.values["eta"] = list_value(c->eta);
    } else {
      lbl.values["p_left"] = num_value(c->p_left);
      lbl.values["p_right"] = num_value(c->p_right);
      lbl.values["threshold"] = num_value(c->threshold);
    }
  } else {
    const auto& reg = std::get<RegressionLabel>(e.process.label());
    lbl.values["kind"] = str_value("regression");
    lbl.values["mean"] = str_value(reg.mean.name());
    lbl.values["mean_a"] = num_value(reg.mean.a);
    lbl.values["mean_b"] = num_value(reg.mean.b);
    lbl.values["noise"] = str_value(reg.noise.name());
    lbl.values["noise_scale"] = num_value(reg.noise.scale);
    if (reg.noise.kind == NoiseSpec::Kind::StudentT)
      lbl.values["dof"] = num_value(reg.noise.dof);
    lbl.values["q"] = num_value(reg.noise.q);
  }

  toml::Table& l = doc.tables["loss"];
  l.values["kind"] = str_value(e.loss.name());
  if (e.loss.kind() == LossKind::EpsilonInsensitive)
    l.values["epsilon"] = num_value(e.loss.param());
  if (e.loss.kind() == LossKind::Huber) l.values["delta"] = num_value(e.loss.param());
  if (e.loss.y_range()) {
    l.values["y_lo"] = num_value(e.loss.y_range()->lo);
    l.values["y_hi"] = num_value(e.loss.y_range()->hi);
  }

  toml::Table& k = doc.tables["kernel"];
  k.values["kind"] = str_value(e.kernel.name());
  if (e.kernel.kind() == KernelKind::Gaussian) k.values["sigma"] = num_value(e.kernel.sigma());
  if (e.kernel.kind() == KernelKind::Polynomial) {
    k.values["degree"] = num_value(e.kernel.degree());
    k.values["offset"] = num_value(e.kernel.offset());
  }
  k.values["input_dim"] = num_value(e.kernel.input_dim());

  toml::Table& s = doc.tables["schedule"];
  s.values["c"] = num_value(e.schedule.c);
  s.values["gamma"] = num_value(e.schedule.gamma);
  s.values["mixing_alpha"] = num_value(e.mixing_alpha);
  s.values["mixing_beta"] = num_value(e.mixing_beta);

  toml::Table& x = doc.tables["experiment"];
  {
    std::vector<double> ns(e.n_grid.begin(), e.n_grid.end());
    x.values["n_grid"] = list_value(ns);
    std::vector<double> seeds;
    for (std::uint64_t sd : e.seeds) seeds.push_back(static_cast<double>(sd));
    x.values["seeds"] = list_value(seeds);
  }
  x.values["test_m"] = num_value(e.test_m);
  x.values["ref_m_factor"] = num_value(e.ref_m_factor);
  x.values["tol"] = num_value(e.tol);

  toml::Table& mix = doc.tables["mixing"];
  mix.values["lags"] = num_value(rc.mixing_lags);
  toml::Table& sim = doc.tables["simulate"];
  sim.values["n"] = num_value(rc.simulate_n);
  sim.values["seed"] = num_value(static_cast<double>(rc.simulate_seed));
  return doc;
}

}  // namespace

ResolvedConfig config_from_table(toml::Table doc) {
  ResolvedConfig rc;
  Reader top(doc, "config");
  rc.experiment.name = top.string("name", "experiment");
  rc.experiment.process = parse_process(top.subtable("process"), rc.warnings);
  rc.experiment.loss = parse_loss(top.subtable("loss"));
  rc.experiment.kernel =
      parse_kernel(top.subtable("kernel"), rc.experiment.process.input_dim());

  if (const toml::Table* st = top.subtable("schedule")) {
    Reader r(*st, "schedule");
    rc.experiment.schedule.c = r.number("c", 1.0);
    rc.experiment.schedule.gamma = r.number("gamma", 0.25);
    rc.experiment.mixing_alpha = r.number("mixing_alpha", 1.0);
    rc.experiment.mixing_beta = r.number("mixing_beta", 1.0);
    r.finish();
  }

  if (const toml::Table* et = top.subtable("experiment")) {
    Reader r(*et, "experiment");
    if (r.has("n_grid")) {
      rc.experiment.n_grid.clear();
      for (double v : r.number_list("n_grid"))
        rc.experiment.n_grid.push_back(static_cast<int>(std::llround(v)));
    }
    if (r.has("seeds")) {
      rc.experiment.seeds.clear();
      for (double v : r.number_list("seeds"))
        rc.experiment.seeds.push_back(static_cast<std::uint64_t>(std::llround(v)));
    }
    rc.experiment.test_m = r.integer("test_m", 10000);
    rc.experiment.ref_m_factor = r.integer("ref_m_factor", 20);
    rc.experiment.tol = r.number("tol", 1e-8);
    r.finish();
  }
  if (rc.experiment.n_grid.empty()) rc.experiment.n_grid = {100, 400, 1600};
  if (rc.experiment.seeds.empty()) rc.experiment.seeds = {1, 2, 3, 4, 5};

  if (const toml::Table* mt = top.subtable("mixing")) {
    Reader r(*mt, "mixing");
    rc.mixing_lags = r.integer("lags", 10);
    r.finish();
  }
  if (const toml::Table* st = top.subtable("simulate")) {
    Reader r(*st, "simulate");
    rc.simulate_n = r.integer("n", 1000);
    rc.simulate_seed = static_cast<std::uint64_t>(r.integer("seed", 1));
    r.finish();
  }
  top.finish();

  validate_config(rc.experiment);
  rc.resolved = resolve_echo(rc);
  return rc;
}

ResolvedConfig load_config(const std::string& path,
                           const std::vector<std::string>& overrides) {
  toml::Table doc = toml::parse_file(path);
  for (const std::string& ov : overrides) {
    const std::size_t eq = ov.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must look like key.path=value: " + ov);
    toml::set_path(doc, ov.substr(0, eq), toml::parse_value(ov.substr(eq + 1)));
  }
  return config_from_table(std::move(doc));
}

}  // namespace depsvm
