#include "psfm/cli.hpp"

#include "psfm/counterexample.hpp"
#include "psfm/io.hpp"
#include "psfm/shifts.hpp"
#include "psfm/traceclass.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace psfm::cli {
namespace {

using io::decimal;
using io::Json;

struct Result {
  Json report;
  bool passed = false;
};

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json rows_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json decimals(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(decimal(v(i)));
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < s.size() && (s[used] == ' ' || s[used] == '\t')) ++used;
  if (used == 0 || used != s.size() || !std::isfinite(v))
    throw InputError(what + ": '" + s + "' is not a finite number");
  return v;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_real(item, what));
  if (out.empty()) throw InputError(what + ": empty list");
  return out;
}

long parse_long(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InputError(what + ": '" + s + "' is not an integer");
  return v;
}

struct Alpha {
  WeightSequence weights;
  std::string description;
};

// --alpha beats the file's alphas, which beat the dyadic default.
Alpha make_alpha(const RunConfig& cfg, bool flag_given, Index n,
                 const std::optional<std::vector<double>>& from_file = std::nullopt) {
  if (!flag_given && from_file) {
    if (static_cast<Index>(from_file->size()) < n)
      throw InputError("alphas in file: " + std::to_string(from_file->size()) +
                       " values for dimension " + std::to_string(n));
    return {WeightSequence(*from_file), "file"};
  }
  const std::string& spec = cfg.alpha_spec;
  if (spec == "dyadic") return {WeightSequence::dyadic(n), spec};
  if (spec.rfind("geom:", 0) == 0) {
    const double base = parse_real(spec.substr(5), "--alpha");
    if (!(base > 1.0)) throw InputError("--alpha geom:BASE needs BASE > 1");
    return {WeightSequence::geometric(base, n), spec};
  }
  std::vector<double> values = parse_reals(spec, "--alpha");
  if (static_cast<Index>(values.size()) < n)
    throw InputError("--alpha: " + std::to_string(values.size()) + " values for dimension " +
                     std::to_string(n));
  return {WeightSequence(std::move(values)), spec};
}

Json config_json(const RunConfig& cfg, const std::string& command, const std::string& alpha = "") {
  Json c{{"command", command},
         {"tol_rank", cfg.tol_rank},
         {"tol_psd", cfg.tol_psd},
         {"tol_verify", cfg.tol_verify}};
  if (!alpha.empty()) c["alpha"] = alpha;
  c["seed"] = cfg.seed;
  c["validate"] = cfg.validate;
  return c;
}

// ---- measure pipelines ----------------------------------------------------

Result cmd_dilate(const RunConfig& cfg, bool alpha_flag, const std::string& path) {
  const io::PsfmFile file = io::read_psfm(path, cfg.validate, cfg.tol_psd);
  const DiscretePSFM& e = file.measure;
  const Alpha alpha = make_alpha(cfg, alpha_flag, e.dim(), file.alphas);
  const NaimarkDilation d = dilate(e, alpha.weights, cfg.tol_rank);
  const DilationReport r = verify_dilation(e, d, cfg.tol_verify);

  Result res;
  res.passed = r.passed();
  Json& rep = res.report;
  rep["kdim"] = d.kdim;
  rep["dim"] = d.dim;
  rep["atoms"] = e.size();
  rep["checks"] = {{"reconstruction", r.reconstruction},
                   {"projection", r.projection},
                   {"minimality", r.minimality},
                   {"norm_eq", r.norm_eq}};
  rep["max_defects"] = {{"reconstruction", decimal(r.reconstruction_defect)},
                        {"projection", decimal(r.projection_defect)},
                        {"resolution", decimal(r.resolution_defect)},
                        {"norm", decimal(r.norm_defect)}};
  rep["span_rank"] = r.span_rank;
  rep["scale"] = decimal(r.scale);
  rep["passed"] = res.passed;
  Json cfg_json = config_json(cfg, "dilate", alpha.description);
  cfg_json["input"] = path;
  rep["config"] = std::move(cfg_json);
  return res;
}

Result cmd_diagonalize(const RunConfig& cfg, bool alpha_flag, const std::string& path) {
  const io::PsfmFile file = io::read_psfm(path, cfg.validate, cfg.tol_psd);
  const DiscretePSFM& e = file.measure;
  const Alpha alpha = make_alpha(cfg, alpha_flag, e.dim(), file.alphas);

  const PointwiseDecomposition p = decompose(e, alpha.weights, cfg.tol_rank);
  const DirectIntegralModel model = direct_integral_model(p);
  const NaimarkDilation gram = dilate(e, alpha.weights, cfg.tol_rank);
  const DirectIntegralReport di = check_direct_integral(model, e, gram, cfg.tol_verify);
  const LambdaOperator lambda = lambda_operator(e, alpha.weights);
  const auto ses = density_operators(p, lambda, cfg.tol_verify, cfg.tol_rank);
  const auto pom = pom_density_route(e, alpha.weights, cfg.tol_verify, cfg.tol_rank);
  const RouteCrossCheck cc = cross_check_routes(e, alpha.weights, p, ses, pom, cfg.tol_verify);

  Result res;
  res.passed = di.passed() && cc.agree;
  Json& rep = res.report;
  rep["dim"] = e.dim();
  Json atoms = Json::array();
  for (std::size_t w = 0; w < e.size(); ++w) {
    atoms.push_back({{"label", p.labels[w]},
                     {"n", p.atoms[w].rank},
                     {"mu", p.mu.weights[w]},
                     {"d_rows", rows_json(p.atoms[w].d_rows)},
                     {"density", {{"trace", decimal(ses[w].trace)},
                                  {"rank", ses[w].rank},
                                  {"eigvals", decimals(ses[w].eigenvalues)}}}});
  }
  rep["atoms"] = std::move(atoms);
  rep["total_rank"] = p.total_rank();
  rep["mu_total"] = p.mu.total();
  rep["direct_integral"] = {{"reconstruction", di.reconstruction},
                            {"density", di.density},
                            {"equivalence", di.equivalence},
                            {"block_dim", model.total_dim},
                            {"kdim_gram_route", di.kdim_gram_route},
                            {"reconstruction_defect", decimal(di.reconstruction_defect)},
                            {"equivalence_defect", decimal(di.intertwiner.max_defect())}};
  Json mismatches = Json::array();
  for (std::size_t w : cc.rank_mismatches) mismatches.push_back(p.labels[w]);
  rep["routes"] = {{"agree", cc.agree},
                   {"max_entry_difference", decimal(cc.max_entry_difference)},
                   {"max_trace_defect", decimal(cc.max_trace_defect)},
                   {"mass_defect", decimal(cc.mass_defect)},
                   {"reconstruction_defect", decimal(cc.reconstruction_defect)},
                   {"total_variation", decimal(cc.total_variation)},
                   {"total_variation_bound", decimal(cc.total_variation_bound)},
                   {"rank_mismatches", std::move(mismatches)}};
  rep["passed"] = res.passed;
  Json cfg_json = config_json(cfg, "diagonalize", alpha.description);
  cfg_json["input"] = path;
  rep["config"] = std::move(cfg_json);
  return res;
}

Vector random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

Result cmd_verify(const RunConfig& cfg, bool alpha_flag, const std::string& path, int samples) {
  const io::PsfmFile file = io::read_psfm(path, false, cfg.tol_psd);
  const DiscretePSFM& e = file.measure;
  const Index n = e.dim();
  Result res;
  Json& rep = res.report;
  rep["dim"] = n;
  rep["atoms"] = e.size();

  Json bad = Json::array();
  for (const Atom& a : e.atoms()) {
    const PositivityReport pr = is_positive(a.form, cfg.tol_psd);
    if (!pr.positive) bad.push_back({{"label", a.label}, {"min_eigenvalue", decimal(pr.min_eigenvalue)}});
  }
  const bool positive = bad.empty();
  rep["checks"]["positivity"] = positive;
  rep["non_positive_atoms"] = std::move(bad);
  if (!positive) {
    res.passed = false;
    rep["passed"] = false;
    Json cfg_json = config_json(cfg, "verify");
    cfg_json["input"] = path;
    rep["config"] = std::move(cfg_json);
    return res;
  }

  const Alpha alpha = make_alpha(cfg, alpha_flag, n, file.alphas);
  std::mt19937_64 rng(cfg.seed);
  const double scale = std::max(1.0, max_abs(e.total().matrix()));

  double polar = 0.0;
  for (const Atom& a : e.atoms()) {
    const Form back = polarize([&](const Vector& v) { return evaluate(a.form, v, v); }, n);
    polar = std::max(polar, max_abs(Matrix(back.matrix() - a.form.matrix())) / scale);
  }

  const NaimarkDilation d = dilate(e, alpha.weights, cfg.tol_rank);
  const DilationReport dr = verify_dilation(e, d, cfg.tol_verify);
  const PointwiseDecomposition p = decompose(e, alpha.weights, cfg.tol_rank);

  double cs = 0.0;
  double recon = 0.0;
  double min_diag = 0.0;
  std::bernoulli_distribution coin(0.5);
  for (int s = 0; s < samples; ++s) {
    const Vector phi = random_vector(rng, n);
    const Vector psi = random_vector(rng, n);
    std::vector<std::size_t> subset;
    for (std::size_t w = 0; w < e.size(); ++w)
      if (coin(rng)) subset.push_back(w);
    const Form ex = e.on(subset);
    const double norms = std::max(1e-300, phi.squaredNorm() * psi.squaredNorm());
    for (const Atom& a : e.atoms()) {
      const double lhs = std::norm(evaluate(a.form, phi, psi));
      const double rhs = evaluate(a.form, phi, phi).real() * evaluate(a.form, psi, psi).real();
      cs = std::max(cs, (lhs - rhs) / (scale * scale * norms));
    }
    const double unit = std::sqrt(norms);
    recon = std::max(recon, std::abs(reconstruct(p, subset, phi, psi) - evaluate(ex, phi, psi)) /
                                (scale * unit));
    min_diag = std::min(min_diag, reconstruct(p, subset, phi, phi).real() / (scale * phi.squaredNorm()));
  }

  const LambdaOperator lambda = lambda_operator(e, alpha.weights);
  const auto ses = density_operators(p, lambda, cfg.tol_verify, cfg.tol_rank);
  const auto pom = pom_density_route(e, alpha.weights, cfg.tol_verify, cfg.tol_rank);
  const RouteCrossCheck cc = cross_check_routes(e, alpha.weights, p, ses, pom, cfg.tol_verify);
  const DirectIntegralReport di =
      check_direct_integral(direct_integral_model(p), e, d, cfg.tol_verify);

  const bool polar_ok = polar <= cfg.tol_verify;
  const bool cs_ok = cs <= cfg.tol_verify;
  const bool recon_ok = recon <= cfg.tol_verify;
  const bool diag_ok = min_diag >= -1e-12;
  rep["checks"] = {{"positivity", true},
                   {"polarization", polar_ok},
                   {"cauchy_schwarz", cs_ok},
                   {"dilation", dr.passed()},
                   {"pointwise_reconstruction", recon_ok},
                   {"pointwise_diagonal", diag_ok},
                   {"density_routes", cc.agree},
                   {"direct_integral", di.passed()}};
  rep["max_defects"] = {{"polarization", decimal(polar)},
                        {"cauchy_schwarz_excess", decimal(cs)},
                        {"dilation_reconstruction", decimal(dr.reconstruction_defect)},
                        {"dilation_projection", decimal(dr.projection_defect)},
                        {"pointwise_reconstruction", decimal(recon)},
                        {"pointwise_min_diagonal", decimal(min_diag)},
                        {"density_route_difference", decimal(cc.max_entry_difference)},
                        {"direct_integral_reconstruction", decimal(di.reconstruction_defect)}};
  rep["kdim"] = d.kdim;
  rep["samples"] = samples;
  res.passed = polar_ok && cs_ok && dr.passed() && recon_ok && diag_ok && cc.agree && di.passed();
  rep["passed"] = res.passed;
  Json cfg_json = config_json(cfg, "verify", alpha.description);
  cfg_json["input"] = path;
  rep["config"] = std::move(cfg_json);
  return res;
}

Result cmd_spectral_detect(const RunConfig& cfg, bool alpha_flag, const std::string& path,
                           double detector_tol) {
  const io::PsfmFile file = io::read_psfm(path, cfg.validate, cfg.tol_psd);
  const DiscretePSFM& e = file.measure;
  const Alpha alpha = make_alpha(cfg, alpha_flag, e.dim(), file.alphas);
  const NaimarkDilation d = dilate(e, alpha.weights, cfg.tol_rank);
  const SpectralCheck sc = is_spectral(e, d, detector_tol);
  const PointwiseDecomposition p = decompose(e, alpha.weights, cfg.tol_rank);
  const OnbReport onb = onb_check(p, e, detector_tol);

  Result res;
  res.passed = sc.agree() && onb.orthonormal_basis == sc.idempotent_atoms;
  Json& rep = res.report;
  rep["spectral"] = sc.idempotent_atoms;
  rep["detectors"] = {{"dilation", sc.spectral},
                      {"pointwise_onb", onb.orthonormal_basis},
                      {"idempotency_oracle", sc.idempotent_atoms}};
  rep["kdim"] = d.kdim;
  rep["dim"] = e.dim();
  rep["block_total"] = onb.block_total;
  rep["max_defects"] = {{"j_unitarity", decimal(sc.j_defect)},
                        {"idempotency", decimal(sc.idempotency_defect)},
                        {"onb_gram", decimal(onb.gram_defect)}};
  rep["passed"] = res.passed;
  Json cfg_json = config_json(cfg, "spectral-detect", alpha.description);
  cfg_json["input"] = path;
  cfg_json["detector_tol"] = detector_tol;
  rep["config"] = std::move(cfg_json);
  return res;
}

// ---- shifts ---------------------------------------------------------------

struct ShiftArgs {
  std::string weights;
  std::optional<long> window;
};

ShiftWeights make_weights(const ShiftArgs& a) {
  std::vector<double> values = parse_reals(a.weights, "--weights");
  long lo = 0;
  long hi = static_cast<long>(values.size());
  if (a.window) {
    if (*a.window < 0) throw InputError("--window must be nonnegative");
    lo = -*a.window;
    hi = *a.window;
    const auto need = static_cast<std::size_t>(hi - lo);
    if (values.size() == 1) values.assign(need, values[0]);
    if (values.size() != need)
      throw InputError("--window " + std::to_string(*a.window) + " needs " + std::to_string(need) +
                       " weights (or one to broadcast), got " + std::to_string(values.size()));
  }
  return ShiftWeights(lo, hi, std::vector<Complex>(values.begin(), values.end()));
}

Json shift_config(const RunConfig& cfg, const std::string& command, const ShiftWeights& w) {
  Json c = config_json(cfg, command);
  c["window"] = Json::array({w.lo(), w.hi()});
  Json weights = Json::array();
  for (const Complex& x : w.weights()) weights.push_back(x.real());
  c["weights"] = std::move(weights);
  return c;
}

Result cmd_shift_classify(const RunConfig& cfg, const ShiftArgs& args) {
  const ShiftWeights w = make_weights(args);
  const ShiftClass cls = classify(w);
  const Eigen::VectorXd ev = hermitian_eigenvalues(moment_matrix(w).matrix());
  const double min_ev = ev.size() ? ev(0) : 0.0;
  const bool psd = min_ev >= -cfg.tol_psd;
  Result res;
  res.passed = psd == (cls != ShiftClass::NotPositive);
  res.report["class"] = to_string(cls);
  res.report["moment_min_eigenvalue"] = decimal(min_ev);
  res.report["psd_oracle"] = psd;
  res.report["agrees"] = res.passed;
  res.report["passed"] = res.passed;
  res.report["config"] = shift_config(cfg, "shift classify", w);
  return res;
}

Result cmd_shift_minor(const RunConfig& cfg, const ShiftArgs& args, const std::string& indices,
                       double tol) {
  const ShiftWeights w = make_weights(args);
  const MomentMatrix m = moment_matrix(w);
  std::vector<std::vector<long>> subsets;
  if (!indices.empty()) {
    std::vector<long> s;
    for (const auto& item : split(indices, ',')) s.push_back(parse_long(item, "--indices"));
    subsets.push_back(std::move(s));
  } else {
    const Index n = w.size();
    if (n > 16) throw InputError("shift minor: window too large for all subsets; pass --indices");
    for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
      std::vector<long> s;
      for (Index k = 0; k < n; ++k)
        if (mask & (1ul << k)) s.push_back(w.lo() + static_cast<long>(k));
      subsets.push_back(std::move(s));
    }
  }
  double worst = -1.0;
  Json worst_json;
  for (const auto& s : subsets) {
    const MinorComparison c = principal_minor(m, s);
    if (c.defect() > worst) {
      worst = c.defect();
      worst_json = {{"indices", s},
                    {"determinant", complex_json(c.determinant)},
                    {"product_formula", decimal(c.product_formula)}};
    }
  }
  Result res;
  res.passed = worst <= tol;
  res.report["subsets_checked"] = subsets.size();
  res.report["max_defect"] = decimal(std::max(worst, 0.0));
  res.report["worst"] = std::move(worst_json);
  res.report["passed"] = res.passed;
  Json c = shift_config(cfg, "shift minor", w);
  c["minor_tol"] = tol;
  res.report["config"] = std::move(c);
  return res;
}

Result cmd_shift_arc(const RunConfig& cfg, const ShiftArgs& args, double t0, double t1) {
  const ShiftWeights w = make_weights(args);
  const ShiftClass cls = classify(w);
  const Form f = arc_form(w, t0, t1);
  const PositivityReport pr = is_positive(f, cfg.tol_psd);
  Result res;
  res.passed = cls == ShiftClass::NotPositive || pr.positive;
  res.report["class"] = to_string(cls);
  res.report["form"] = io::matrix_to_json(f.matrix());
  res.report["min_eigenvalue"] = decimal(pr.min_eigenvalue);
  res.report["positive"] = pr.positive;
  res.report["passed"] = res.passed;
  Json c = shift_config(cfg, "shift arc", w);
  c["t0"] = t0;
  c["t1"] = t1;
  res.report["config"] = std::move(c);
  return res;
}

// ---- generalized eigenvectors ----------------------------------------------

Result cmd_normal_expand(const RunConfig& cfg, bool alpha_flag, const std::string& path, double tol,
                         double cluster_tol) {
  const Matrix t = io::read_matrix(path);
  const Alpha alpha = make_alpha(cfg, alpha_flag, t.rows());
  const GeneralizedEigensystem g = spectral_expand(t, alpha.weights, tol, cluster_tol);
  Result res;
  res.passed = g.passed;
  Json points = Json::array();
  for (const SpectralPoint& p : g.points)
    points.push_back({{"lambda", complex_json(p.lambda)},
                      {"multiplicity", p.multiplicity},
                      {"mu", p.mu},
                      {"d_rows", rows_json(p.d_rows)}});
  res.report["dim"] = t.rows();
  res.report["points"] = std::move(points);
  res.report["residuals"] = {{"normality", decimal(g.normality_defect)},
                             {"expansion", decimal(g.expansion_residual)},
                             {"identity", decimal(g.identity_residual)},
                             {"eigen", decimal(g.eigen_residual)},
                             {"adjoint", decimal(g.adjoint_residual)}};
  res.report["size_bound"] = decimal(g.size_bound);
  res.report["passed"] = g.passed;
  Json c = config_json(cfg, "normal expand", alpha.description);
  c["input"] = path;
  c["tol"] = tol;
  c["cluster_tol"] = cluster_tol;
  res.report["config"] = std::move(c);
  return res;
}

Result cmd_shift_eigen(const RunConfig& cfg, const std::string& lambda_text, long half_width) {
  const std::vector<double> parts = parse_reals(lambda_text, "--lambda");
  if (parts.size() > 2) throw InputError("--lambda: expected RE or RE,IM");
  const Complex lambda(parts[0], parts.size() == 2 ? parts[1] : 0.0);
  const auto sol = shift_eigensolve(lambda, half_width);
  Result res;
  Json& rep = res.report;
  rep["lambda"] = complex_json(lambda);
  rep["exists"] = sol.has_value();
  if (sol) {
    Json d = Json::array();
    for (Index i = 0; i < sol->d.values.size(); ++i) d.push_back(complex_json(sol->d.values(i)));
    rep["first_index"] = sol->d.first;
    rep["d"] = std::move(d);
    rep["residual"] = decimal(sol->residual);
    rep["adjoint_residual"] = decimal(sol->adjoint_residual);
    rep["simultaneous"] = sol->simultaneous;
    res.passed = sol->residual <= 1e-12;
  } else {
    res.passed = true;
  }
  rep["passed"] = res.passed;
  Json c = config_json(cfg, "shift-eigen");
  c["window"] = half_width;
  rep["config"] = std::move(c);
  return res;
}

Result cmd_haar(const RunConfig& cfg, long half_width, long grid,
                const std::vector<std::string>& arc_texts) {
  std::vector<HaarArc> arcs;
  for (const auto& a : arc_texts) {
    const auto parts = split(a, ':');
    if (parts.size() != 2) throw InputError("--arc: expected BEGIN:END grid indices, got '" + a + "'");
    arcs.push_back({parse_long(parts[0], "--arc"), parse_long(parts[1], "--arc")});
  }
  const HaarReport h = haar_recovery(half_width, grid, arcs);
  Result res;
  res.passed = h.passed;
  res.report = {{"fourier_defect", decimal(h.fourier_defect)},
                {"full_circle_defect", decimal(h.full_circle_defect)},
                {"arc_form_full_defect", decimal(h.arc_form_full_defect)},
                {"arc_error", decimal(h.arc_error)},
                {"arc_error_bound", decimal(h.arc_error_bound)},
                {"passed", h.passed}};
  Json c = config_json(cfg, "haar");
  c["window"] = half_width;
  c["grid"] = grid;
  c["arcs"] = arc_texts;
  res.report["config"] = std::move(c);
  return res;
}

// ---- counterexample --------------------------------------------------------

Json bound_json(const std::optional<double>& b) { return b ? Json(*b) : Json(nullptr); }

Result cmd_cex_build(const RunConfig& cfg, const std::string& a, long size) {
  const CounterexampleMatrix m = build(GrowthSequence::parse(a), size);
  const CounterexampleReport r = verify_properties(m);
  Result res;
  res.passed = r.passed();
  Json& rep = res.report;
  rep["bound"] = bound_json(r.analytic_bound);
  rep["partial_square_sum"] = decimal(r.partial_square_sum);
  rep["complete_rows"] = r.complete_rows;
  rep["checks"] = {{"symmetric", r.symmetric},
                   {"zero_diagonal", r.zero_diagonal},
                   {"entries_in_unit_interval", r.entries_in_unit_interval},
                   {"finite_support", r.finite_support},
                   {"unit_row_sums", r.unit_row_sums},
                   {"row_sums_exact", r.row_sums_exact ? Json(*r.row_sums_exact) : Json(nullptr)},
                   {"square_sum_below_one", r.square_sum_below_one},
                   {"square_sum_monotone", r.square_sum_monotone},
                   {"square_sum_identity", r.square_sum_identity},
                   {"within_bound", r.within_bound},
                   {"bound_below_one", r.bound_below_one}};
  rep["max_defects"] = {{"asymmetry", decimal(r.max_asymmetry)},
                        {"row_sum", decimal(r.max_row_sum_defect)},
                        {"square_sum_identity", decimal(r.square_sum_identity_defect)},
                        {"b_error", decimal(r.max_b_error)}};
  rep["failures"] = r.failures;
  rep["warnings"] = r.warnings;
  rep["passed"] = res.passed;
  Json c = config_json(cfg, "cex build");
  c["a"] = m.growth().describe();
  c["size"] = size;
  rep["config"] = std::move(c);
  return res;
}

Result cmd_cex_spectrum(const RunConfig& cfg, const std::string& a, const std::string& sizes_text) {
  std::vector<Index> sizes;
  for (const auto& s : split(sizes_text, ',')) {
    const long k = parse_long(s, "--sizes");
    if (k < 1) throw InputError("--sizes: section sizes must be positive");
    sizes.push_back(k);
  }
  if (sizes.empty()) throw InputError("--sizes: empty list");
  const Index k_max = *std::max_element(sizes.begin(), sizes.end());
  const CounterexampleMatrix m = build(GrowthSequence::parse(a), k_max);
  const SpectrumSweep sweep = spectrum_sweep(m, sizes);
  const CounterexampleReport r = verify_properties(m);

  Result res;
  res.passed = sweep.monotone;
  Json sections = Json::array();
  for (const SectionSpectrum& s : sweep.sections) {
    res.passed = res.passed && s.within_hs_bound;
    sections.push_back({{"size", s.size},
                        {"max_abs_eig", decimal(s.max_abs)},
                        {"hs_norm", decimal(s.frobenius)},
                        {"within_hs_bound", s.within_hs_bound}});
  }
  Json& rep = res.report;
  rep["bound"] = bound_json(r.analytic_bound);
  rep["partial_square_sum"] = decimal(r.partial_square_sum);
  rep["sections"] = std::move(sections);
  rep["monotone"] = sweep.monotone;
  rep["passed"] = res.passed;
  Json c = config_json(cfg, "cex spectrum");
  c["a"] = m.growth().describe();
  c["sizes"] = sizes;
  rep["config"] = std::move(c);
  return res;
}

Result cmd_cex_eigencheck(const RunConfig& cfg, const std::string& a, long size) {
  const CounterexampleMatrix m = build(GrowthSequence::parse(a), size);
  const EigencheckReport r = eigencheck_e(m);
  Result res;
  res.passed = r.passed;
  Json coords = Json::array();
  for (Index i = 0; i < r.coordinates.size(); ++i)
    coords.push_back({{"row", r.rows[static_cast<std::size_t>(i)]},
                      {"value", decimal(r.coordinates(i).real())},
                      {"adjoint_value", decimal(r.adjoint_coordinates(i).real())}});
  Json& rep = res.report;
  rep["complete_rows_checked"] = r.rows.size();
  rep["coordinates"] = std::move(coords);
  rep["max_defect"] = decimal(r.max_defect);
  rep["exact"] = r.exact;
  rep["excluded_rows"] = r.excluded_rows;
  rep["passed"] = r.passed;
  Json c = config_json(cfg, "cex eigencheck");
  c["a"] = m.growth().describe();
  c["size"] = size;
  rep["config"] = std::move(c);
  return res;
}

void emit(const Json& report, const RunConfig& cfg, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw InputError(cfg.output + ": cannot open for writing");
  f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Positive sesquilinear form measures: dilations, decompositions, expansions", "psfm"};
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig cfg;
  auto* tol_verify_opt = app.add_option("--tol-verify", cfg.tol_verify, "Verification tolerance")
                             ->check(CLI::PositiveNumber);
  app.add_option("--tol-rank", cfg.tol_rank, "Relative rank threshold")->check(CLI::PositiveNumber);
  app.add_option("--tol-psd", cfg.tol_psd, "Positivity tolerance")->check(CLI::PositiveNumber);
  auto* alpha_opt = app.add_option("--alpha", cfg.alpha_spec, "dyadic | geom:BASE | a0,a1,...");
  app.add_option("--output", cfg.output, "Write the report here instead of stdout");
  app.add_option("--seed", cfg.seed, "Seed for randomized checks");
  bool no_validate = false;
  app.add_flag("--no-validate", no_validate, "Skip atom positivity checks at parse time");

  std::string input;
  auto* dilate_cmd = app.add_subcommand("dilate", "Naimark dilation of a PSFM file");
  dilate_cmd->add_option("input", input, "PSFM JSON")->required();
  auto* diag_cmd = app.add_subcommand("diagonalize", "Pointwise decomposition and densities");
  diag_cmd->add_option("input", input, "PSFM JSON")->required();
  int samples = 100;
  auto* verify_cmd = app.add_subcommand("verify", "Seeded property checks on a PSFM file");
  verify_cmd->add_option("input", input, "PSFM JSON")->required();
  verify_cmd->add_option("--samples", samples, "Random vector pairs")->check(CLI::PositiveNumber);
  double detector_tol = 1e-9;
  auto* detect_cmd = app.add_subcommand("spectral-detect", "Is a normalized PSFM spectral?");
  detect_cmd->add_option("input", input, "PSFM JSON")->required();
  detect_cmd->add_option("--detector-tol", detector_tol)->check(CLI::PositiveNumber);

  ShiftArgs shift_args;
  long window = 0;
  auto add_weights = [&](CLI::App* c) {
    c->add_option("--weights", shift_args.weights, "Comma-separated shift weights")->required();
    return c->add_option("--window", window, "Symmetric window [-L, L]");
  };
  auto* shift_cmd = app.add_subcommand("shift", "Weighted shift moment forms");
  shift_cmd->require_subcommand(1);
  auto* classify_cmd = shift_cmd->add_subcommand("classify", "Spectral / Semispectral / NotPositive");
  auto* classify_window = add_weights(classify_cmd);
  std::string indices;
  double minor_tol = 1e-12;
  auto* minor_cmd = shift_cmd->add_subcommand("minor", "Principal minors vs product formula");
  auto* minor_window = add_weights(minor_cmd);
  minor_cmd->add_option("--indices", indices, "Window indices; default all subsets");
  minor_cmd->add_option("--tol", minor_tol)->check(CLI::PositiveNumber);
  double t0 = 0.0;
  double t1 = 0.0;
  auto* arc_cmd = shift_cmd->add_subcommand("arc", "Arc form E([t0, t1))");
  auto* arc_window = add_weights(arc_cmd);
  arc_cmd->add_option("--t0", t0)->required();
  arc_cmd->add_option("--t1", t1)->required();

  double expand_tol = 1e-9;
  double cluster_tol = 1e-8;
  auto* normal_cmd = app.add_subcommand("normal", "Normal matrix eigenexpansions");
  normal_cmd->require_subcommand(1);
  auto* expand_cmd = normal_cmd->add_subcommand("expand", "Generalized eigenvector expansion");
  expand_cmd->add_option("input", input, "Matrix JSON or CSV")->required();
  expand_cmd->add_option("--tol", expand_tol)->check(CLI::PositiveNumber);
  expand_cmd->add_option("--cluster-tol", cluster_tol)->check(CLI::PositiveNumber);

  std::string lambda_text;
  long half_width = 0;
  auto* seig_cmd = app.add_subcommand("shift-eigen", "Generalized eigenvector of the unit shift");
  seig_cmd->add_option("--lambda", lambda_text, "RE or RE,IM")->required();
  seig_cmd->add_option("--window", half_width, "Half width J")->required()->check(CLI::NonNegativeNumber);

  long grid = 0;
  std::vector<std::string> arc_texts;
  auto* haar_cmd = app.add_subcommand("haar", "Haar measure recovery on a circle grid");
  haar_cmd->add_option("--window", half_width, "Half width J")->required()->check(CLI::NonNegativeNumber);
  haar_cmd->add_option("--grid", grid, "Grid size M")->required();
  haar_cmd->add_option("--arc", arc_texts, "BEGIN:END grid-index arcs");

  std::string growth = "geom:8,2";
  long size = 0;
  std::string sizes_text;
  auto* cex_cmd = app.add_subcommand("cex", "Generalized eigenvalue outside the spectrum");
  cex_cmd->require_subcommand(1);
  auto* cbuild = cex_cmd->add_subcommand("build", "Build and verify a section");
  cbuild->add_option("--a", growth, "geom:FIRST,RATIO or list:a0,a1,...");
  cbuild->add_option("--size", size, "Section size K")->required();
  auto* cspec = cex_cmd->add_subcommand("spectrum", "Section eigenvalues");
  cspec->add_option("--a", growth, "geom:FIRST,RATIO or list:a0,a1,...");
  cspec->add_option("--sizes", sizes_text, "Comma-separated section sizes")->required();
  auto* ceig = cex_cmd->add_subcommand("eigencheck", "Apply T~ to (1, 1, ...) on complete rows");
  ceig->add_option("--a", growth, "geom:FIRST,RATIO or list:a0,a1,...");
  ceig->add_option("--size", size, "Section size K")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPassed : kInputError;
  }

  try {
    if (const char* env = std::getenv("PSFM_TOL"); env && tol_verify_opt->count() == 0) {
      cfg.tol_verify = parse_real(env, "PSFM_TOL");
      if (!(cfg.tol_verify > 0.0)) throw InputError("PSFM_TOL must be positive");
    }
    cfg.validate = !no_validate;
    const bool alpha_flag = alpha_opt->count() > 0;
    auto window_of = [&](CLI::Option* o) -> std::optional<long> {
      if (o->count() == 0) return std::nullopt;
      return window;
    };

    Result res;
    if (*dilate_cmd) res = cmd_dilate(cfg, alpha_flag, input);
    else if (*diag_cmd) res = cmd_diagonalize(cfg, alpha_flag, input);
    else if (*verify_cmd) res = cmd_verify(cfg, alpha_flag, input, samples);
    else if (*detect_cmd) res = cmd_spectral_detect(cfg, alpha_flag, input, detector_tol);
    else if (*classify_cmd) {
      shift_args.window = window_of(classify_window);
      res = cmd_shift_classify(cfg, shift_args);
    } else if (*minor_cmd) {
      shift_args.window = window_of(minor_window);
      res = cmd_shift_minor(cfg, shift_args, indices, minor_tol);
    } else if (*arc_cmd) {
      shift_args.window = window_of(arc_window);
      res = cmd_shift_arc(cfg, shift_args, t0, t1);
    } else if (*expand_cmd) res = cmd_normal_expand(cfg, alpha_flag, input, expand_tol, cluster_tol);
    else if (*seig_cmd) res = cmd_shift_eigen(cfg, lambda_text, half_width);
    else if (*haar_cmd) res = cmd_haar(cfg, half_width, grid, arc_texts);
    else if (*cbuild) res = cmd_cex_build(cfg, growth, size);
    else if (*cspec) res = cmd_cex_spectrum(cfg, growth, sizes_text);
    else if (*ceig) res = cmd_cex_eigencheck(cfg, growth, size);
    else throw InputError("no subcommand");

    emit(res.report, cfg, out);
    return res.passed ? kPassed : kCheckFailed;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConsistencyError& e) {
    err << "check failed: " << e.what() << "\n";
    Json rep{{"passed", false}, {"error", e.what()}, {"config", config_json(cfg, args.empty() ? "" : args[0])}};
    try {
      emit(rep, cfg, out);
    } catch (const InputError&) {
      return kInputError;
    }
    return kCheckFailed;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace psfm::cli
