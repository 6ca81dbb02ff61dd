#include "couplekit/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "couplekit/errors.hpp"
#include "couplekit/interp.hpp"
#include "couplekit/kernels.hpp"
#include "couplekit/kfun.hpp"
#include "couplekit/orbit.hpp"
#include "couplekit/structure.hpp"

namespace couplekit {

using ordered_json = nlohmann::ordered_json;

const Vector& CoupleFile::element(const std::string& name) const {
  for (const auto& [key, value] : elements) {
    if (key == name) return value;
  }
  throw InvalidArgument("no element named '" + name + "'");
}

namespace {

Vector number_array(const ordered_json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidArgument(what + " must be an array of numbers");
  Vector out;
  for (const auto& x : j) {
    if (!x.is_number()) throw InvalidArgument(what + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Exponent parse_exponent(const ordered_json& j, const std::string& what) {
  if (j.is_number()) return Exponent::finite(j.get<double>());
  if (j.is_string() && j.get<std::string>() == "inf") return Exponent::infinity();
  throw InvalidArgument(what + " must be a number or \"inf\"");
}

ordered_json exponent_json(Exponent p) {
  if (p.is_infinite()) return "inf";
  return p.value();
}

ordered_json couple_json(const Couple& c) {
  ordered_json j;
  j["n"] = c.dim();
  j["w0"] = c.w0();
  j["w1"] = c.w1();
  j["p0"] = exponent_json(c.p0());
  j["p1"] = exponent_json(c.p1());
  return j;
}

}  // namespace

CoupleFile parse_couple_file(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw InvalidArgument(std::string("couple file: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("couple file: top level must be an object");
  static const std::set<std::string> known{"n", "w0", "w1", "p0", "p1", "elements"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw InvalidArgument("couple file: unknown key '" + item.key() + "'");
  }
  for (const char* key : {"n", "w0", "w1", "p0", "p1"}) {
    if (!j.contains(key)) throw InvalidArgument(std::string("couple file: missing key '") + key + "'");
  }
  if (!j["n"].is_number_unsigned() || j["n"].get<std::size_t>() == 0) {
    throw InvalidArgument("couple file: n must be a positive integer");
  }
  const auto n = j["n"].get<std::size_t>();
  CoupleFile f{make_couple(n, number_array(j["w0"], "w0"), number_array(j["w1"], "w1"),
                           parse_exponent(j["p0"], "p0"), parse_exponent(j["p1"], "p1")),
               {}};
  if (j.contains("elements")) {
    const auto& el = j["elements"];
    if (!el.is_object()) throw InvalidArgument("couple file: elements must be an object");
    for (const auto& item : el.items()) {
      Vector v = number_array(item.value(), "element '" + item.key() + "'");
      check_element(f.couple, v);
      f.elements.emplace_back(item.key(), std::move(v));
    }
  }
  return f;
}

CoupleFile load_couple_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_couple_file(ss.str());
}

std::string emit_couple_file(const CoupleFile& file) {
  ordered_json j = couple_json(file.couple);
  if (!file.elements.empty()) {
    ordered_json el = ordered_json::object();
    for (const auto& [name, v] : file.elements) el[name] = v;
    j["elements"] = el;
  }
  return j.dump(2) + "\n";
}

std::uint64_t couple_hash(const Couple& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : couple_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

const Exponent kOne = Exponent::finite(1.0);
const Exponent kInf = Exponent::infinity();

std::string hex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string short_num(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

// Per-suite report writer: one line per check, overall verdict at the end.
class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}
  void note(const std::string& line) { out_ << line << "\n"; }
  void check(const std::string& line, bool pass) {
    out_ << line << (pass ? " PASS" : " FAIL") << "\n";
    all_ = all_ && pass;
  }
  int finish() {
    out_ << "RESULT " << (all_ ? "PASS" : "FAIL") << "\n";
    return all_ ? kExitOk : kExitPropertyFailure;
  }

 private:
  std::ostream& out_;
  bool all_ = true;
};

std::vector<std::pair<std::string, Vector>> report_elements(const CoupleFile& f,
                                                            std::mt19937_64& rng) {
  if (!f.elements.empty()) return f.elements;
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<std::pair<std::string, Vector>> out;
  for (int k = 0; k < 3; ++k) {
    Vector v(f.couple.dim());
    for (auto& x : v) x = u(rng);
    out.emplace_back("random" + std::to_string(k), std::move(v));
  }
  return out;
}

bool is_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

Vector dyadic(int lo, int hi) {
  Vector ts;
  for (int k = lo; k <= hi; ++k) ts.push_back(std::exp2(k));
  return ts;
}

int suite_norms(const CoupleFile& f, std::mt19937_64& rng, std::ostream& out) {
  Report r(out);
  const Couple& c = f.couple;
  const auto n = static_cast<Eigen::Index>(c.dim());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_map = [&] {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = u(rng);
    }
    return LinearMap(m, c, c);
  };
  auto elements = report_elements(f, rng);
  Vector ts = dyadic(-4, 4);
  std::vector<Vector> samples;
  for (const auto& [name, v] : elements) samples.push_back(v);
  int worst_pairs = 0;
  double worst_ratio = 0.0;
  for (int k = 0; k < 20; ++k) {
    LinearMap s = random_map(), t = random_map();
    NormBound st = operator_norm_l(compose(s, t));
    NormBound ns = operator_norm_l(s), nt = operator_norm_l(t);
    double bound = ns.upper * nt.upper;
    if (bound > 0.0) worst_ratio = std::max(worst_ratio, st.lower / bound);
    if (st.lower > bound * (1.0 + 1e-12)) ++worst_pairs;
    double bl = operator_norm_b_lower(t, samples, ts);
    if (bl > nt.upper * (1.0 + 1e-9)) ++worst_pairs;
  }
  r.check("multiplicative pairs=20 max_ratio=" + short_num(worst_ratio), worst_pairs == 0);
  for (const auto& [name, v] : elements) {
    double worst = 0.0;
    bool ok = true;
    for (double t : ts) {
      double ki = k_functional(c, v, t, kInf).value;
      double k2 = k_functional(c, v, t, Exponent::finite(2.0)).value;
      double k1 = k_functional(c, v, t, kOne).value;
      ok = ok && ki <= k2 * (1 + 1e-9) && k2 <= k1 * (1 + 1e-9) && k1 <= 2 * ki * (1 + 1e-9);
      if (ki > 0.0) worst = std::max(worst, k1 / ki);
    }
    r.check("k_chain element=" + name + " max_k1_over_kinf=" + short_num(worst), ok);
  }
  return r.finish();
}

int suite_duality(const CoupleFile& f, std::mt19937_64& rng, std::ostream& out) {
  if (f.couple.dim() > 4) throw Unsupported("duality suite: dimension above 4");
  Report r(out);
  for (const auto& [name, v] : report_elements(f, rng)) {
    for (double t : {1.0, 0.25, 4.0}) {
      DualIdentity d = dual_k_identity(f.couple, v, t);
      bool ok = std::abs(d.k_inf - d.dual_sup) <= 1e-6 * std::max(d.k_inf, 1e-300) ||
                (d.k_inf == 0.0 && d.dual_sup == 0.0);
      r.check("duality element=" + name + " t=" + short_num(t) + " k_inf=" + short_num(d.k_inf) +
                  " dual_sup=" + short_num(d.dual_sup),
              ok);
    }
  }
  return r.finish();
}

int suite_subcouple(const CoupleFile& f, std::mt19937_64& rng, std::ostream& out) {
  Report r(out);
  const Couple& c = f.couple;
  const std::size_t n = c.dim();
  auto elements = report_elements(f, rng);
  Vector ts = dyadic(-6, 6);
  std::vector<std::vector<std::size_t>> keeps;
  for (std::size_t i = 0; i < n; ++i) keeps.push_back({i});
  if (n > 2) {
    std::vector<std::size_t> head;
    for (std::size_t i = 0; i + 1 < n; ++i) head.push_back(i);
    keeps.push_back(head);
  }
  for (const auto& keep : keeps) {
    SubcoupleSpec spec = SubcoupleSpec::coordinates(c, keep);
    std::vector<Vector> samples;
    for (const auto& [name, v] : elements) {
      Vector s;
      for (std::size_t i : keep) s.push_back(v[i]);
      samples.push_back(s);
    }
    std::string label;
    for (std::size_t i : keep) label += (label.empty() ? "" : ",") + std::to_string(i);
    SubcoupleVerdict v = is_b_subcouple(spec, samples, ts);
    r.check("coordinates={" + label + "} b_subcouple=" + (v.is_b ? "yes" : "no") +
                " max_gap=" + short_num(v.max_gap),
            v.is_b);
    if (has_exact_k_curve(c)) {
      SubcoupleNormVerdict nv = subcouple_norm_check(spec, {0.5, kOne}, samples);
      r.check("coordinates={" + label + "} norms_equal=" + (nv.equal ? "yes" : "no"), nv.equal);
    }
  }
  for (const auto& [name, v] : elements) {
    if (is_zero(v)) continue;
    SubcoupleSpec spec = SubcoupleSpec::span(c, {v});
    SubcoupleVerdict sv = is_b_subcouple(spec, {{1.0}}, ts);
    r.note("span=" + name + " b_subcouple=" + (sv.is_b ? "yes" : "no") +
           " max_gap=" + short_num(sv.max_gap));
    if (has_exact_k_curve(c)) {
      SubcoupleNormVerdict nv = subcouple_norm_check(spec, {0.5, kOne}, {{1.0}});
      r.check("span=" + name + " inclusion=" + (nv.inclusion ? "yes" : "no") +
                  " norms_equal=" + (nv.equal ? "yes" : "no"),
              nv.inclusion);
    }
  }
  return r.finish();
}

int suite_fundamental(const CoupleFile& f, std::mt19937_64& rng, std::ostream& out) {
  Report r(out);
  std::vector<Vector> nonzero;
  for (const auto& [name, v] : report_elements(f, rng)) {
    if (is_zero(v)) {
      r.note("element=" + name + " skipped (zero)");
      continue;
    }
    Decomposition d = fundamental_decomposition(f.couple, v);
    double ks = k_functional(f.couple, v, 1.0, kOne).value;
    GammaEstimate g = gamma_estimate(f.couple, {v});
    bool ok = d.recomposition_error <= 1e-8 * ks && g.estimate <= 4.0;
    r.check("element=" + name + " levels=" + std::to_string(d.levels.front()) + ".." +
                std::to_string(d.levels.back()) + " recomposition_error=" +
                short_num(d.recomposition_error) + " c_dyadic=" + short_num(d.c_meas) +
                " c_meas=" + short_num(g.estimate),
            ok);
    nonzero.push_back(v);
  }
  if (!nonzero.empty()) {
    r.note("gamma_estimate=" + short_num(gamma_estimate(f.couple, nonzero).estimate));
  }
  return r.finish();
}

int suite_interp(const CoupleFile& f, std::mt19937_64& rng, std::ostream& out) {
  if (!has_exact_k_curve(f.couple)) throw Unsupported("interp suite: no exact K-curve");
  Report r(out);
  for (const auto& [name, v] : report_elements(f, rng)) {
    ConcaveCurve phi = *exact_k_curve(f.couple, v);
    double k1 = phi(1.0), j1 = j_functional(f.couple, v, 1.0, kInf);
    for (double theta : {0.25, 0.5, 0.75}) {
      for (Exponent q : {kOne, Exponent::finite(2.0), kInf}) {
        KMethodParams pm{theta, q};
        double norm = k_space_norm(phi, pm);
        double nn = normalized_k_space_norm(phi, pm);
        bool ok = nn >= k1 * (1 - 1e-12) && nn <= j1 * (1 + 1e-12);
        r.check("element=" + name + " theta=" + short_num(theta) + " q=" + q.to_string() +
                    " norm=" + short_num(norm) + " normalized=" + short_num(nn),
                ok);
      }
    }
    Vector b = decreasing_rearrangement(v);
    for (double p0 : {1.0, 2.0}) {
      LorentzComparison lc = lorentz_k_equiv(p0, kInf, b);
      r.check("element=" + name + " lorentz p0=" + short_num(p0) +
                  " ratio_min=" + short_num(lc.min_ratio) + " ratio_max=" + short_num(lc.max_ratio),
              lc.within_window);
    }
  }
  return r.finish();
}

int cmd_k_curve(const std::string& path, const std::string& element, const std::string& p_text,
                double t_min, double t_max, int points, bool exact, const std::string& output,
                std::ostream& out) {
  CoupleFile f = load_couple_file(path);
  const Vector& a = f.element(element);
  Exponent p = Exponent::parse(p_text);
  if (!(t_min > 0.0) || !(t_max > 0.0)) throw InvalidArgument("t must be positive");
  if (points < 1) throw InvalidArgument("--points must be at least 1");
  if (points > 1 && !(t_max > t_min)) throw InvalidArgument("--t-max must exceed --t-min");

  std::ostringstream csv;
  csv << "# couple_hash=" << hex(couple_hash(f.couple)) << "\n";
  csv << "# element=" << element << "\n";
  csv << "# functional=K\n";
  csv << "# p=" << p.to_string() << "\n";
  std::optional<ConcaveCurve> curve;
  if (exact && p.is_one()) curve = exact_k_curve(f.couple, a);
  if (curve) {
    csv << "# mode=exact\n";
    csv << "# origin=" << num(curve->origin()) << "\n";
    csv << "# initial_slope=" << num(curve->initial_slope()) << "\n";
    csv << "# terminal_slope=" << num(curve->terminal_slope()) << "\n";
    csv << "t,value\n";
    for (std::size_t i = 0; i < curve->breakpoints().size(); ++i) {
      csv << num(curve->breakpoints()[i]) << "," << num(curve->values()[i]) << "\n";
    }
  } else {
    Vector ts;
    for (int i = 0; i < points; ++i) {
      ts.push_back(points == 1 ? t_min : t_min * std::pow(t_max / t_min, double(i) / (points - 1)));
    }
    auto ks = parallel::k_on_grid(f.couple, a, ts, p);
    csv << "# mode=sampled\n";
    csv << "t,value\n";
    for (std::size_t i = 0; i < ts.size(); ++i) csv << num(ts[i]) << "," << num(ks[i].value) << "\n";
  }
  if (output.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(output);
    if (!file) throw InvalidArgument("cannot write '" + output + "'");
    file << csv.str();
  }
  return kExitOk;
}

void write_matrix(std::ostream& os, const HlpConstruction& h) {
  os << "# reconstruction_error=" << num(h.reconstruction_error)
     << " max_column_sum=" << num(h.max_column_sum) << " max_row_sum=" << num(h.max_row_sum)
     << " t_transforms=" << h.t_transforms << "\n";
  os << h.matrix.rows() << " " << h.matrix.cols() << "\n";
  for (Eigen::Index i = 0; i < h.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.matrix.cols(); ++j) {
      os << (j ? " " : "") << num(h.matrix(i, j));
    }
    os << "\n";
  }
}

int cmd_orbit(const std::string& path_a, const std::string& name_a, const std::string& path_b,
              const std::string& name_b, bool construct, const std::string& matrix_out,
              std::ostream& out) {
  CoupleFile fa = load_couple_file(path_a), fb = load_couple_file(path_b);
  OrbitProblem problem{fa.couple, fb.couple, fa.element(name_a), fb.element(name_b)};
  if (construct && !(fa.couple.is_unweighted_l1_linf() && fb.couple.is_unweighted_l1_linf())) {
    throw Unsupported("construction not supported for this couple");
  }
  Domination d = dominates(problem);
  if (!d.holds) {
    out << "VIOLATED witness_t=" << num(d.witness_t.value_or(0.0)) << "\n";
    return kExitPropertyFailure;
  }
  out << "DOMINATES margin=" << num(d.margin) << "\n";
  if (construct) {
    HlpConstruction h = hlp_construct(problem.a, problem.b);
    if (matrix_out.empty()) {
      write_matrix(out, h);
    } else {
      std::ofstream file(matrix_out);
      if (!file) throw InvalidArgument("cannot write '" + matrix_out + "'");
      write_matrix(file, h);
      out << "# matrix written to " << matrix_out << "\n";
    }
  }
  return kExitOk;
}

int cmd_report(const std::string& path, const std::string& suite, std::uint64_t seed,
               std::ostream& out) {
  CoupleFile f = load_couple_file(path);
  std::mt19937_64 rng(seed);
  out << "# suite=" << suite << " couple_hash=" << hex(couple_hash(f.couple)) << " seed=" << seed
      << "\n";
  if (suite == "norms") return suite_norms(f, rng, out);
  if (suite == "duality") return suite_duality(f, rng, out);
  if (suite == "subcouple") return suite_subcouple(f, rng, out);
  if (suite == "fundamental-lemma") return suite_fundamental(f, rng, out);
  return suite_interp(f, rng, out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Banach couple toolkit: K-functionals, orbits and interpolation norms"};
  app.require_subcommand(1);

  std::string path, element, p_text = "1", output;
  double t_min = 1e-3, t_max = 1e3;
  int points = 61;
  bool exact = false;
  auto* kc = app.add_subcommand("k-curve", "Export the K-curve of an element as CSV");
  kc->add_option("file", path, "Couple file")->required();
  kc->add_option("--element", element, "Element name")->required();
  kc->add_option("--p", p_text, "Exponent of K_p (number or inf)");
  kc->add_option("--t-min", t_min, "Smallest t");
  kc->add_option("--t-max", t_max, "Largest t");
  kc->add_option("--points", points, "Number of log-spaced samples");
  kc->add_flag("--exact", exact, "Breakpoint representation when a closed form applies");
  kc->add_option("--output", output, "Write the CSV here instead of stdout");

  std::string path_b, element_b, matrix_out;
  bool construct = false;
  auto* ob = app.add_subcommand("orbit", "Test K-domination and build the operator");
  ob->add_option("file_a", path, "Couple file of a")->required();
  ob->add_option("element_a", element, "Element name in file_a")->required();
  ob->add_option("file_b", path_b, "Couple file of b")->required();
  ob->add_option("element_b", element_b, "Element name in file_b")->required();
  ob->add_flag("--construct", construct, "Build T with Ta = b ({l_1, l_inf} only)");
  ob->add_option("--matrix-out", matrix_out, "Write the matrix here instead of stdout");

  std::string suite;
  std::uint64_t seed = 1;
  auto* rp = app.add_subcommand("report", "Run a property suite on a couple file");
  rp->add_option("file", path, "Couple file")->required();
  rp->add_option("--suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"norms", "duality", "subcouple", "fundamental-lemma", "interp"}));
  rp->add_option("--seed", seed, "Seed for generated samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (kc->parsed()) {
      return cmd_k_curve(path, element, p_text, t_min, t_max, points, exact, output, out);
    }
    if (ob->parsed()) return cmd_orbit(path, element, path_b, element_b, construct, matrix_out, out);
    return cmd_report(path, suite, seed, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Unsupported& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputeError;
  }
}

}  // namespace couplekit
