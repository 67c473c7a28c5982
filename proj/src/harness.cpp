#include "appletaste/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "appletaste/adversaries.hpp"
#include "appletaste/combinatorics.hpp"
#include "appletaste/concepts.hpp"
#include "appletaste/errors.hpp"
#include "appletaste/experts.hpp"

namespace appletaste {

namespace {

std::size_t parse_count(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("not a non-negative integer: '" + s + "'");
  }
  if (pos != s.size() || s.front() == '-') throw ParseError("not a non-negative integer: '" + s + "'");
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) throw ParseError("not a number: '" + s + "'");
  return v;
}

bool parse_flag(const std::string& s) {
  std::string v = boost::algorithm::to_lower_copy(s);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParseError("not a boolean: '" + s + "'");
}

// Exponent of a "2^e" token, or nullopt for a plain integer.
std::optional<std::size_t> power_of_two(const std::string& s) {
  if (s.size() < 3 || s[0] != '2' || s[1] != '^') return std::nullopt;
  std::size_t e = parse_count(s.substr(2));
  if (e > 62) throw ParseError("exponent too large in '" + s + "'");
  return e;
}

bool is_expert_adversary(const std::string& id) { return id == "phase" || id == "agnostic_phase"; }
bool is_class_adversary(const std::string& id) { return id == "version_space" || id == "width1"; }
bool is_fuzz(const std::string& id) { return id == "fuzz_realizable" || id == "fuzz_agnostic"; }
bool is_class_learner(const std::string& id) {
  return id == "narrow" || id == "doubling_narrow" || id == "reduction" || id == "doubling_reduction";
}
bool is_expert_learner(const std::string& id) {
  return id == "realizable_expat" || id == "expat" || id == "dt_expat" || id == "greedy";
}

struct Cell {
  std::size_t n = 0;
  std::size_t T = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

struct Skip {
  std::string reason;
};

struct Built {
  std::unique_ptr<Learner> learner;
  std::unique_ptr<Adversary> adversary;
  std::size_t n = 0;
  std::optional<ExpertBounds> split_upper;  // per-kind bounds for the expert learners
  std::optional<double> upper;
  std::optional<double> floor;
};

class SweepRunner {
 public:
  explicit SweepRunner(const SweepConfig& cfg) : cfg_(cfg) {
    if (!is_expert_learner(cfg.learner) && !is_class_learner(cfg.learner))
      throw ParameterError("unknown learner '" + cfg.learner + "'");
    if (!is_expert_adversary(cfg.adversary) && !is_class_adversary(cfg.adversary) && !is_fuzz(cfg.adversary))
      throw ParameterError("unknown adversary '" + cfg.adversary + "'");
    class_game_ = !cfg.class_file.empty() || cfg.random_class_d > 0;
    if (!cfg.class_file.empty() && cfg.random_class_d > 0)
      throw ParameterError("give either class_file or random_class_d, not both");
    if (class_game_ && is_expert_adversary(cfg.adversary))
      throw ParameterError("adversary '" + cfg.adversary + "' plays expert games; drop the class settings");
    if (!class_game_ && (is_class_adversary(cfg.adversary) || is_class_learner(cfg.learner)))
      throw ParameterError("'" + cfg.learner + "' vs '" + cfg.adversary + "' needs class_file or random_class_d");
    if (!cfg.class_file.empty()) file_class_ = std::make_shared<const FiniteClass>(read_class_file(cfg.class_file));
  }

  bool class_game() const { return class_game_; }

  RunRow run(const Cell& cell) const {
    RunRow row;
    row.learner = cfg_.learner;
    row.adversary = cfg_.adversary;
    row.n = cell.n;
    row.T = cell.T;
    row.k = cell.k;
    row.seed = cell.seed;
    try {
      Built b = build(cell);
      row.n = b.n;
      GameOptions opts;
      opts.record_instances = false;
      Transcript tr = run_game(*b.learner, *b.adversary, cell.T, opts);
      row.mistakes = score(tr);
      row.certificate_ok = verify_certificate(tr);
      row.upper = b.upper;
      row.floor = b.floor;
      row.bound = b.upper ? b.upper : b.floor;
      bool ok = row.certificate_ok;
      if (b.split_upper) {
        ok = ok && row.mistakes.false_negatives <= b.split_upper->false_negatives &&
             row.mistakes.false_positives <= b.split_upper->false_positives;
      } else if (b.upper) {
        ok = ok && static_cast<double>(row.mistakes.total) <= *b.upper;
      }
      if (b.floor) ok = ok && static_cast<double>(row.mistakes.total) >= *b.floor;
      row.within_bound = ok;
    } catch (const Skip& s) {
      row.skipped = true;
      row.skip_reason = s.reason;
    } catch (const ParameterError& e) {
      row.skipped = true;
      row.skip_reason = e.what();
    } catch (const BudgetExceeded& e) {
      row.skipped = true;
      row.skip_reason = e.what();
    }
    return row;
  }

 private:
  std::shared_ptr<const FiniteClass> cell_class(const Cell& cell) const {
    if (file_class_) return file_class_;
    RandomClassSpec spec;
    spec.d = cfg_.random_class_d;
    spec.T = cell.T;
    spec.c = cfg_.c;
    spec.seed = cell.seed;
    return std::make_shared<const FiniteClass>(sample_random_class(spec).H);
  }

  Built build(const Cell& cell) const {
    if (cell.k > cell.T) throw Skip{"k > T"};
    if (cell.T < 1) throw Skip{"T < 1"};
    Built b;
    std::shared_ptr<const FiniteClass> H;
    if (class_game_) {
      H = cell_class(cell);
      if (H->empty()) throw Skip{"empty class"};
      b.n = H->size();
    } else {
      b.n = cell.n;
    }
    build_adversary(cell, H, b);
    build_learner(cell, H, b);
    return b;
  }

  void build_adversary(const Cell& cell, const std::shared_ptr<const FiniteClass>& H, Built& b) const {
    const std::string& id = cfg_.adversary;
    const std::size_t T = cell.T;
    const std::size_t k = cell.k;
    if ((id == "phase" || id == "fuzz_realizable" || id == "version_space") && k != 0)
      throw Skip{"adversary '" + id + "' is realizable; k must be 0"};
    if (id == "phase") {
      if (b.n < 2) throw Skip{"n < 2"};
      b.adversary = std::make_unique<PhaseAdversary>(b.n, T);
      if (b.n >= T) b.floor = std::sqrt(static_cast<double>(T) * std::log2(static_cast<double>(b.n))) / 8.0;
    } else if (id == "agnostic_phase") {
      auto adv = std::make_unique<AgnosticPhaseAdversary>(b.n, T, k);
      b.floor = adv->floor_bound();
      b.adversary = std::move(adv);
    } else if (is_fuzz(id)) {
      const FuzzKind kind = id == "fuzz_realizable" ? FuzzKind::realizable : FuzzKind::agnostic;
      if (H) {
        b.adversary = std::make_unique<FuzzAdversary>(H, T, kind, k, cell.seed);
      } else {
        if (b.n < 1) throw Skip{"n < 1"};
        b.adversary = std::make_unique<FuzzAdversary>(b.n, T, kind, k, cell.seed);
      }
    } else if (id == "version_space") {
      std::size_t threshold = 0;
      if (cfg_.vs_threshold) {
        threshold = *cfg_.vs_threshold;
      } else if (cfg_.random_class_d > 0) {
        threshold = static_cast<std::size_t>(
            std::ceil(std::pow(static_cast<double>(T), static_cast<double>(cfg_.random_class_d) / 2.0)));
      } else {
        throw ParameterError("version_space needs vs_threshold for a class file");
      }
      b.adversary = std::make_unique<VersionSpaceAdversary>(H, threshold);
      if (cfg_.random_class_d > 0) {
        const double d = static_cast<double>(cfg_.random_class_d);
        const double t = static_cast<double>(T);
        b.floor = 0.5 * std::sqrt(d * t * std::log2(t)) * cfg_.c / 100.0;
      }
    } else if (id == "width1") {
      const std::size_t depth_cap = static_cast<std::size_t>(std::sqrt(static_cast<double>(T) / (k + 1)));
      if (depth_cap < 1) throw Skip{"horizon too short for a width-1 block"};
      DepthResult d1 = width_depth(*H, 1, depth_cap);
      std::size_t D = std::min(d1.value, depth_cap);
      if (D < 1) throw Skip{"class has no width-1 tree of depth >= 1"};
      auto tree = find_shattered_tree(make_budgeted(H, 0), 1, D);
      if (!tree) throw Skip{"no width-1 tree found"};
      auto adv = std::make_unique<Width1Adversary>(H, *tree, k, D, T);
      b.floor = static_cast<double>(adv->forced_floor());
      b.adversary = std::move(adv);
    }
  }

  ExpertLearnerState expert_state(const std::string& id, std::size_t n, std::size_t T, std::size_t k) const {
    ExpertLearnerState s = id == "realizable_expat" ? realizable_expat_state(n, T) : expat_state(n, T, k);
    if (!cfg_.eta && !cfg_.L) return s;
    Threshold L = s.L;
    if (cfg_.L) {
      if (!(*cfg_.L > 0)) throw ParameterError("L override must be positive");
      L = Threshold{*cfg_.L, 0};
    }
    const double eta = cfg_.eta ? *cfg_.eta : s.eta;
    return make_expert_state(n, eta, L, s.k, s.mode, T);
  }

  void build_learner(const Cell& cell, const std::shared_ptr<const FiniteClass>& H, Built& b) const {
    const std::string& id = cfg_.learner;
    const std::size_t T = cell.T;
    const std::size_t k = cell.k;
    std::unique_ptr<Learner> inner;
    if (id == "realizable_expat" || id == "expat") {
      ExpertLearnerState s = expert_state(id, b.n, T, k);
      // The realizable learner's guarantee covers k = 0 adversaries only.
      if (id == "expat" || k == 0) {
        ExpertBounds eb = expat_bounds(s);
        b.split_upper = eb;
        b.upper = eb.total();
      }
      inner = std::make_unique<ExpertLearner>(std::move(s), id);
    } else if (id == "dt_expat") {
      if (b.n < 2) throw Skip{"n < 2"};
      inner = make_dt_expat(b.n);
    } else if (id == "greedy") {
      inner = std::make_unique<GreedyExpertLearner>(b.n, k);
    } else if (id == "narrow") {
      b.learner = make_narrow_concept_at(H, k);
      if (H->size() <= kMaxSearchHypotheses) {
        DepthResult d = d1_k(*H, k, T);
        if (!d.cap_exceeded) b.upper = static_cast<double>(d.value + k);
      }
      return;
    } else if (id == "doubling_narrow") {
      b.learner = make_doubling_narrow(H);
      return;
    } else if (id == "reduction") {
      auto r = make_reduction_learner(H, T, k);
      b.upper = r->mistake_bound();
      b.learner = std::move(r);
      return;
    } else if (id == "doubling_reduction") {
      b.learner = make_doubling_reduction(H);
      return;
    }
    if (H) {
      b.learner = std::make_unique<ClassExpertAdapter>(H, std::move(inner));
    } else {
      b.learner = std::move(inner);
    }
  }

  const SweepConfig& cfg_;
  bool class_game_ = false;
  std::shared_ptr<const FiniteClass> file_class_;
};

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  boost::algorithm::split(out, line, boost::algorithm::is_any_of(","));
  for (auto& f : out) boost::algorithm::trim(f);
  return out;
}

}  // namespace

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> out;
  std::vector<std::string> parts;
  std::string trimmed = boost::algorithm::trim_copy(text);
  if (trimmed.empty()) return out;
  boost::algorithm::split(parts, trimmed, boost::algorithm::is_any_of(","));
  for (auto part : parts) {
    boost::algorithm::trim(part);
    if (part.empty()) throw ParseError("empty grid entry in '" + text + "'");
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      if (auto e = power_of_two(part)) {
        out.push_back(std::size_t{1} << *e);
      } else {
        out.push_back(parse_count(part));
      }
      continue;
    }
    const std::string lo = boost::algorithm::trim_copy(part.substr(0, dots));
    const std::string hi = boost::algorithm::trim_copy(part.substr(dots + 2));
    auto elo = power_of_two(lo);
    auto ehi = power_of_two(hi);
    if (elo.has_value() != ehi.has_value()) throw ParseError("mixed range '" + part + "'");
    if (elo) {
      if (*elo > *ehi) throw ParseError("empty range '" + part + "'");
      for (std::size_t e = *elo; e <= *ehi; ++e) out.push_back(std::size_t{1} << e);
    } else {
      const std::size_t a = parse_count(lo), b = parse_count(hi);
      if (a > b) throw ParseError("empty range '" + part + "'");
      if (b - a > 10'000'000) throw ParseError("range too long: '" + part + "'");
      for (std::size_t v = a; v <= b; ++v) out.push_back(v);
    }
  }
  return out;
}

SweepConfig parse_sweep_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> sweep_keys{"learner", "adversary", "n",      "T",
                                                "k",       "seeds",     "n_equals_T", "output",
                                                "threads"};
  static const std::set<std::string> param_keys{"eta",           "L",  "c", "class_file", "random_class_d",
                                                "vs_threshold"};
  for (const auto& [section, body] : tree) {
    const std::set<std::string>* keys = nullptr;
    if (section == "sweep") keys = &sweep_keys;
    else if (section == "params") keys = &param_keys;
    else throw ParseError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      (void)value;
      if (!keys->count(key)) throw ParseError("config: unknown key '" + key + "' in [" + section + "]");
    }
  }

  SweepConfig cfg;
  auto sweep = tree.get_child_optional("sweep");
  if (!sweep) throw ParseError("config: missing [sweep] section");
  auto get = [](const pt::ptree& t, const std::string& key) -> std::optional<std::string> {
    if (auto v = t.get_optional<std::string>(key)) return boost::algorithm::trim_copy(*v);
    return std::nullopt;
  };
  if (auto v = get(*sweep, "learner")) cfg.learner = *v;
  else throw ParseError("config: missing learner");
  if (auto v = get(*sweep, "adversary")) cfg.adversary = *v;
  else throw ParseError("config: missing adversary");
  if (auto v = get(*sweep, "n")) cfg.n = parse_grid(*v);
  if (auto v = get(*sweep, "T")) cfg.T = parse_grid(*v);
  if (auto v = get(*sweep, "k")) cfg.k = parse_grid(*v);
  if (auto v = get(*sweep, "seeds")) {
    cfg.seeds.clear();
    for (auto s : parse_grid(*v)) cfg.seeds.push_back(s);
  }
  if (auto v = get(*sweep, "n_equals_T")) cfg.n_equals_T = parse_flag(*v);
  if (auto v = get(*sweep, "output")) cfg.output = *v;
  if (auto v = get(*sweep, "threads")) cfg.threads = parse_count(*v);

  if (auto params = tree.get_child_optional("params")) {
    if (auto v = get(*params, "eta")) cfg.eta = parse_real(*v);
    if (auto v = get(*params, "L")) cfg.L = parse_real(*v);
    if (auto v = get(*params, "c")) cfg.c = parse_real(*v);
    if (auto v = get(*params, "class_file")) cfg.class_file = *v;
    if (auto v = get(*params, "random_class_d")) cfg.random_class_d = parse_count(*v);
    if (auto v = get(*params, "vs_threshold")) cfg.vs_threshold = parse_count(*v);
  }
  return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  return parse_sweep_config(in);
}

const char* run_csv_header() {
  return "learner,adversary,n,T,k,seed,mistakes,false_pos,false_neg,bound,within_bound";
}

std::vector<RunRow> run_sweep(const SweepConfig& config) {
  SweepRunner runner(config);
  std::vector<Cell> cells;
  std::vector<std::size_t> ns = config.n;
  if (runner.class_game()) ns = {0};  // n is the class size, known per cell
  for (std::size_t T : config.T) {
    std::vector<std::size_t> row_ns = config.n_equals_T && !runner.class_game() ? std::vector<std::size_t>{T} : ns;
    for (std::size_t n : row_ns)
      for (std::size_t k : config.k)
        for (std::uint64_t seed : config.seeds) cells.push_back(Cell{n, T, k, seed});
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return std::tie(a.n, a.T, a.k, a.seed) < std::tie(b.n, b.T, b.k, b.seed);
  });

  std::vector<RunRow> rows(cells.size());
  std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        rows[i] = runner.run(cells[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = cells.size();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_run_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << run_csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.learner << ',' << r.adversary << ',' << r.n << ',' << r.T << ',' << r.k << ',' << r.seed << ',';
    if (r.skipped) {
      out << ",,,,skipped\n";
      continue;
    }
    out << r.mistakes.total << ',' << r.mistakes.false_positives << ',' << r.mistakes.false_negatives << ',';
    if (r.bound) out << format_real(*r.bound);
    out << ',' << (r.within_bound ? 1 : 0) << '\n';
  }
}

std::size_t cmd_run(const SweepConfig& config, std::ostream& fallback) {
  std::vector<RunRow> rows = run_sweep(config);
  if (config.output.empty()) {
    write_run_csv(fallback, rows);
  } else {
    std::ofstream out(config.output);
    if (!out) throw ParameterError("cannot write '" + config.output + "'");
    write_run_csv(out, rows);
    if (!out) throw ParameterError("failed writing '" + config.output + "'");
  }
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const RunRow& r) { return !r.skipped && !r.within_bound; }));
}

ScalingFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw ParameterError("a fit needs at least 4 points");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0)) throw ParameterError("fit points must be positive");
    lx.push_back(std::log2(x));
    ly.push_back(std::log2(y));
  }
  const double n = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 1e-12) throw ParameterError("degenerate fit: constant T");
  if (syy <= 1e-24) throw ParameterError("degenerate fit: constant mistakes");
  ScalingFit fit;
  fit.alpha = sxy / sxx;
  const double intercept = my - fit.alpha * mx;
  fit.a = std::exp2(intercept);
  double rss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + fit.alpha * lx[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  fit.samples = points.size();
  return fit;
}

std::vector<ScalingFit> cmd_fit(std::istream& csv, const std::vector<std::string>& group_by) {
  std::string line;
  if (!std::getline(csv, line)) throw ParseError("fit: empty CSV");
  const std::vector<std::string> header = split_csv_line(line);
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("fit: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cT = column("T");
  const std::size_t cM = column("mistakes");
  const std::size_t cW = column("within_bound");
  std::vector<std::size_t> cg;
  for (const auto& g : group_by) cg.push_back(column(g));

  std::map<std::string, std::map<double, std::vector<double>>> groups;
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (boost::algorithm::trim_copy(line).empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != header.size()) throw ParseError("fit: wrong field count on line " + std::to_string(line_no));
    if (f[cW] == "skipped") continue;
    std::string key;
    for (std::size_t i = 0; i < cg.size(); ++i) key += (i ? "|" : "") + f[cg[i]];
    groups[key][parse_real(f[cT])].push_back(parse_real(f[cM]));
  }

  std::vector<ScalingFit> fits;
  for (auto& [key, by_T] : groups) {
    std::vector<std::pair<double, double>> pts;
    for (auto& [T, ms] : by_T) {
      std::sort(ms.begin(), ms.end());
      const std::size_t h = ms.size() / 2;
      const double median = ms.size() % 2 ? ms[h] : 0.5 * (ms[h - 1] + ms[h]);
      pts.emplace_back(T, median);
    }
    if (pts.size() < 4) throw ParameterError("fit: group '" + key + "' has fewer than 4 T values");
    ScalingFit fit = fit_power_law(pts);
    fit.group = key;
    fits.push_back(fit);
  }
  return fits;
}

void write_fit_csv(std::ostream& out, const std::vector<ScalingFit>& fits) {
  out << "group,alpha,a,residual,samples\n";
  for (const auto& f : fits)
    out << f.group << ',' << format_real(f.alpha) << ',' << format_real(f.a) << ',' << format_real(f.residual)
        << ',' << f.samples << '\n';
}

}  // namespace appletaste
