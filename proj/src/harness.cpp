#include "harnacklab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace hlab::harness {

namespace {

constexpr double kNegativeFloor = -1e-8;

grushin::Rect region_rect(const RegionDescriptor& region, const pde::Grid& g) {
  grushin::Rect r = grushin::bounding_rect(region);
  const double tol = 1e-9 * (g.window.width() + g.window.height());
  if (r.lo.x1 < g.window.lo.x1 - tol || r.lo.x2 < g.window.lo.x2 - tol || r.hi.x1 > g.window.hi.x1 + tol ||
      r.hi.x2 > g.window.hi.x2 + tol)
    throw InvalidParameter(std::string("region ") + std::string(grushin::to_string(region.kind)) +
                           " leaves the grid window");
  return r;
}

// Calls fn(i, j, p) for every node inside the region.
template <typename Fn>
void for_nodes_in(const pde::Grid& g, const RegionDescriptor& region, Fn&& fn) {
  grushin::Rect r = region_rect(region, g);
  const int i0 = std::max(0, static_cast<int>(std::floor((r.lo.x1 - g.window.lo.x1) / g.h1())));
  const int i1 = std::min(g.n1 - 1, static_cast<int>(std::ceil((r.hi.x1 - g.window.lo.x1) / g.h1())));
  const int j0 = std::max(0, static_cast<int>(std::floor((r.lo.x2 - g.window.lo.x2) / g.h2())));
  const int j1 = std::min(g.n2 - 1, static_cast<int>(std::ceil((r.hi.x2 - g.window.lo.x2) / g.h2())));
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      Point2 p = g.node(i, j);
      if (grushin::contains(region, p)) fn(i, j, p);
    }
  }
}

void append_double(std::string& s, double v) {
  char buf[sizeof(double)];
  std::memcpy(buf, &v, sizeof(double));
  s.append(buf, sizeof(double));
}

std::string inputs_digest(const std::string& kind, const GridFunction& u, const GridFunction& f,
                          std::initializer_list<double> params) {
  std::string bytes = kind;
  bytes += '|';
  bytes += std::to_string(u.grid.n1) + "x" + std::to_string(u.grid.n2);
  for (double p : params) append_double(bytes, p);
  for (double v : u.values) append_double(bytes, v);
  for (double v : f.values) append_double(bytes, v);
  return digest_hex(bytes);
}

double region_min(const GridFunction& u, const RegionDescriptor& region) { return node_stats(u, region).inf; }

}  // namespace

std::string digest_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[k] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

RegionDescriptor ball(RegionKind kind, const Point2& center, double radius) {
  switch (kind) {
    case RegionKind::Box: return RegionDescriptor::box(center, radius);
    case RegionKind::BTilde: return RegionDescriptor::btilde(center, radius);
    case RegionKind::G: return RegionDescriptor::g(center, radius);
    case RegionKind::H: return RegionDescriptor::h(center, radius);
    case RegionKind::RingH: break;
  }
  throw InvalidParameter("rings are not balls");
}

NodeStats node_stats(const GridFunction& u, const RegionDescriptor& region) {
  region.validate();
  NodeStats s;
  s.inf = std::numeric_limits<double>::infinity();
  s.sup = -std::numeric_limits<double>::infinity();
  for_nodes_in(u.grid, region, [&](int i, int j, const Point2&) {
    double v = u(i, j);
    s.inf = std::min(s.inf, v);
    s.sup = std::max(s.sup, v);
    ++s.count;
  });
  if (s.count == 0) throw DegenerateInput("region contains no grid node");
  s.measure = static_cast<double>(s.count) * u.grid.h1() * u.grid.h2();
  return s;
}

SNorm compute_S(const RegionDescriptor& region, const GridFunction& f) {
  region.validate();
  SNorm s;
  s.region = region;
  double integral = 0.0;
  std::size_t count = 0;
  for_nodes_in(f.grid, region, [&](int i, int j, const Point2& p) {
    double v = p.x1 * f(i, j);
    integral += v * v;
    ++count;
  });
  if (count == 0) throw DegenerateInput("region contains no grid node");
  s.l2 = std::sqrt(integral * f.grid.h1() * f.grid.h2());
  s.diameter = grushin::region_diameter(region).diameter;
  s.value = s.diameter * s.l2;
  return s;
}

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Vacuous: return "vacuous";
  }
  return "?";
}

double CheckReport::margin(const std::string& key) const {
  for (const auto& [k, v] : margins)
    if (k == key) return v;
  throw InvalidParameter("report has no margin '" + key + "'");
}

double CheckReport::value(const std::string& key) const {
  for (const auto& [k, v] : measured)
    if (k == key) return v;
  throw InvalidParameter("report has no measured value '" + key + "'");
}

void CheckReport::settle() {
  if (status == CheckStatus::Vacuous) return;
  status = CheckStatus::Pass;
  for (const auto& [k, v] : margins)
    if (!(v >= -tolerance)) status = CheckStatus::Fail;
}

CheckReport check_double_ball(const GridFunction& u, const GridFunction& f, const Point2& y, double r,
                              const DBParams& p, RegionKind kind) {
  CheckReport rep;
  rep.kind = "double_ball";
  rep.name = "double_ball";
  rep.tolerance = 1e-12;
  rep.digest = inputs_digest(rep.kind, u, f, {y.x1, y.x2, r, p.gamma, p.eps, p.eta});
  rep.constants = {{"gamma", p.gamma}, {"eps", p.eps}, {"eta", p.eta}, {"r", r}};
  const double m = region_min(u, ball(kind, y, 0.5 * r));
  const double outer_min = region_min(u, ball(kind, y, p.eta * r));
  rep.measured.emplace_back("inf_half", m);
  if (!(m > 0.0) || outer_min < kNegativeFloor) {
    rep.status = CheckStatus::Vacuous;
    rep.detail = m > 0.0 ? "u negative on the enlarged ball" : "inf over the half ball is not positive";
    return rep;
  }
  const double S = compute_S(ball(kind, y, p.eta * r), f).value / m;
  rep.measured.emplace_back("S_normalized", S);
  if (!(S < p.eps)) {
    rep.status = CheckStatus::Vacuous;
    rep.detail = "right-hand side too large";
    return rep;
  }
  const double ratio = region_min(u, ball(kind, y, r)) / m;
  rep.measured.emplace_back("inf_ratio", ratio);
  rep.margins.emplace_back("inf_ratio_minus_gamma", ratio - p.gamma);
  rep.settle();
  return rep;
}

double critical_density_level(const GridFunction& u, const Point2& y, double R, double nu, RegionKind kind) {
  if (!(nu > 0.0 && nu < 1.0)) throw InvalidParameter("nu must lie in (0,1)");
  std::vector<double> vals;
  for_nodes_in(u.grid, ball(kind, y, R), [&](int i, int j, const Point2&) { vals.push_back(u(i, j)); });
  if (vals.empty()) throw DegenerateInput("region contains no grid node");
  auto k = static_cast<std::size_t>(std::ceil(nu * static_cast<double>(vals.size())));
  k = std::clamp<std::size_t>(k, 1, vals.size());
  std::nth_element(vals.begin(), vals.begin() + (k - 1), vals.end(), std::greater<>());
  return vals[k - 1];
}

CheckReport check_critical_density(const GridFunction& u, const GridFunction& f, const Point2& y, double R,
                                   const CDParams& p, RegionKind kind, double level) {
  if (!(level > 0.0)) throw InvalidParameter("normalization level must be > 0");
  CheckReport rep;
  rep.kind = "critical_density";
  rep.name = "critical_density";
  rep.tolerance = 1e-12;
  rep.digest = inputs_digest(rep.kind, u, f, {y.x1, y.x2, R, p.nu, p.c, p.eps, p.eta, level});
  rep.constants = {{"nu", p.nu}, {"c", p.c}, {"eps", p.eps}, {"eta", p.eta}, {"R", R}, {"level", level}};
  std::size_t total = 0;
  std::size_t above = 0;
  for_nodes_in(u.grid, ball(kind, y, R), [&](int i, int j, const Point2&) {
    ++total;
    if (u(i, j) >= level) ++above;
  });
  if (total == 0) throw DegenerateInput("region contains no grid node");
  const double fraction = static_cast<double>(above) / static_cast<double>(total);
  rep.measured.emplace_back("fraction", fraction);
  if (!(fraction >= p.nu)) {
    rep.status = CheckStatus::Vacuous;
    rep.detail = "density hypothesis fails";
    return rep;
  }
  if (region_min(u, ball(kind, y, p.eta * R)) < kNegativeFloor) {
    rep.status = CheckStatus::Vacuous;
    rep.detail = "u negative on the enlarged ball";
    return rep;
  }
  const double inf_half = region_min(u, ball(kind, y, 0.5 * R)) / level;
  const double S = compute_S(ball(kind, y, p.eta * R), f).value / level;
  rep.measured.emplace_back("inf_half", inf_half);
  rep.measured.emplace_back("S", S);
  const double by_inf = inf_half - p.c;
  const double by_S = S - p.eps;
  rep.margins.emplace_back("branch", std::max(by_inf, by_S));
  rep.detail = by_inf >= 0.0 ? "inf branch" : (by_S >= 0.0 ? "S branch" : "neither branch");
  rep.settle();
  return rep;
}

std::vector<double> decay_sequence(const GridFunction& u, const Point2& x0, double R, double M, int k_max,
                                   RegionKind kind, double level) {
  if (!(M > 1.0)) throw InvalidParameter("power decay base M must be > 1");
  if (k_max < 1) throw InvalidParameter("k_max must be >= 1");
  std::vector<double> vals;
  for_nodes_in(u.grid, ball(kind, x0, 0.5 * R), [&](int i, int j, const Point2&) { vals.push_back(u(i, j)); });
  if (vals.empty()) throw DegenerateInput("region contains no grid node");
  std::vector<double> seq;
  double t = level;
  for (int k = 1; k <= k_max; ++k) {
    t *= M;
    auto n = std::count_if(vals.begin(), vals.end(), [&](double v) { return v > t; });
    seq.push_back(static_cast<double>(n) / static_cast<double>(vals.size()));
  }
  return seq;
}

CheckReport check_power_decay(const GridFunction& u, const GridFunction& f, const Point2& x0, double R,
                              const PDParams& p, RegionKind kind, double level) {
  if (!(level > 0.0)) throw InvalidParameter("normalization level must be > 0");
  CheckReport rep;
  rep.kind = "power_decay";
  rep.name = "power_decay";
  rep.tolerance = 1e-12;
  rep.digest = inputs_digest(rep.kind, u, f, {x0.x1, x0.x2, R, p.M, p.gamma, p.eps_P, p.eta_P, double(p.k_max), level});
  rep.constants = {{"M", p.M}, {"gamma", p.gamma}, {"eps_P", p.eps_P}, {"eta_P", p.eta_P}, {"R", R}, {"level", level}};
  const double inf_R = region_min(u, ball(kind, x0, R));
  const double S = compute_S(ball(kind, x0, p.eta_P * R), f).value / level;
  rep.measured = {{"inf", inf_R / level}, {"S", S}};
  if (!(inf_R <= level) || !(S < p.eps_P) || region_min(u, ball(kind, x0, p.eta_P * R)) < kNegativeFloor) {
    rep.status = CheckStatus::Vacuous;
    rep.detail = "hypotheses fail";
    return rep;
  }
  auto seq = decay_sequence(u, x0, R, p.M, p.k_max, kind, level);
  double worst = std::numeric_limits<double>::infinity();
  int first = 0;
  double gk = 1.0;
  for (int k = 1; k <= p.k_max; ++k) {
    gk *= p.gamma;
    double m = gk - seq[k - 1];
    rep.measured.emplace_back("level_fraction_" + std::to_string(k), seq[k - 1]);
    if (m < 0.0 && first == 0) first = k;
    worst = std::min(worst, m);
  }
  rep.measured.emplace_back("first_violation", first);
  rep.margins.emplace_back("decay", worst);
  rep.settle();
  return rep;
}

double harnack_quotient(const GridFunction& u, const GridFunction& f, const Point2& x0, double r, double eta,
                        RegionKind kind) {
  if (!(eta >= 1.0)) throw InvalidParameter("Harnack enlargement must be >= 1");
  NodeStats s = node_stats(u, ball(kind, x0, r));
  const double S = compute_S(ball(kind, x0, eta * r), f).value;
  const double den = s.inf + S;
  if (!(den > 0.0)) throw DegenerateInput("Harnack quotient denominator vanishes");
  return s.sup / den;
}

CheckReport check_abp(const GridFunction& u, const GridFunction& f, double C) {
  pde::AbpReport a = pde::check_abp(u, f, C);
  CheckReport rep;
  rep.kind = "abp";
  rep.name = "abp";
  rep.tolerance = 1e-12;
  rep.digest = inputs_digest(rep.kind, u, f, {C});
  rep.constants = {{"C", C}};
  rep.measured = {{"sup_negative", a.sup_negative}, {"weighted_norm", a.weighted_norm}, {"diameter", a.diameter}};
  rep.margins = {{"abp", a.margin}};
  rep.settle();
  return rep;
}

Problem make_problem(ProblemFamily family, const pde::Grid& grid, std::uint64_t seed, double amplitude, int patches) {
  if (!(amplitude >= 0.0)) throw InvalidParameter("amplitude must be >= 0");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uni = [&](double a, double b) { return a + (b - a) * unit(rng); };
  const double k1 = uni(0.5, 2.0);
  const double k2 = uni(0.5, 2.0);
  const double ph = uni(0.0, 6.283185307179586);
  Problem pr;
  pr.coeffs = pde::CoefficientField::random_patches(grid, seed, patches);
  const grushin::Rect w = grid.window;
  switch (family) {
    case ProblemFamily::Positive: {
      const double c1 = uni(-1.0, 1.0);
      const double c2 = uni(-1.0, 1.0);
      const double a = uni(0.5, 3.0);
      const double b = uni(0.5, 3.0);
      const double p1 = uni(0.0, 6.283185307179586);
      const double p2 = uni(0.0, 6.283185307179586);
      const double norm = std::abs(c1) + std::abs(c2) + 1e-12;
      pr.boundary = GridFunction::sample(grid, [&](const Point2& p) { return 1.0 + 0.5 * std::sin(k1 * p.x1 + k2 * p.x2 + ph); });
      pr.f = GridFunction::sample(grid, [&](const Point2& p) {
        return amplitude * (c1 * std::sin(a * p.x1 + p1) + c2 * std::cos(b * p.x2 + p2)) / norm;
      });
      break;
    }
    case ProblemFamily::Supersolution: {
      const Point2 c{w.lo.x1 + w.width() * uni(0.25, 0.75), w.lo.x2 + w.height() * uni(0.25, 0.75)};
      const double s = std::min(w.width(), w.height()) * uni(0.1, 0.2);
      pr.boundary = GridFunction::sample(grid, [&](const Point2& p) { return 0.05 * (1.0 + std::sin(k1 * p.x1 + k2 * p.x2 + ph)); });
      pr.f = GridFunction::sample(grid, [&](const Point2& p) {
        double d2 = (p.x1 - c.x1) * (p.x1 - c.x1) + (p.x2 - c.x2) * (p.x2 - c.x2);
        return amplitude * std::exp(-0.5 * d2 / (s * s));
      });
      break;
    }
    case ProblemFamily::Homogeneous:
      pr.boundary = GridFunction::sample(grid, [&](const Point2& p) { return std::max(0.0, std::sin(k1 * p.x1 + k2 * p.x2 + ph)); });
      pr.f = GridFunction(grid, 0.0);
      break;
  }
  return pr;
}

RunRecord evaluate_run(const EnsembleConfig& cfg, const GridFunction& u, const GridFunction& f, std::uint64_t seed) {
  RunRecord rec;
  rec.seed = seed;
  rec.min_u = *std::min_element(u.values.begin(), u.values.end());
  if (rec.min_u < kNegativeFloor) {
    rec.discarded = true;
    return rec;
  }
  try {
    rec.quotient = harnack_quotient(u, f, cfg.x0, cfg.r, cfg.eta, cfg.kind);
  } catch (const DegenerateInput&) {
    rec.quotient = std::numeric_limits<double>::quiet_NaN();
  }
  rec.db = check_double_ball(u, f, cfg.x0, cfg.r_db, cfg.db, cfg.kind);

  const double t = critical_density_level(u, cfg.x0, cfg.R_cd, cfg.cd.nu, cfg.kind);
  rec.cd = check_critical_density(u, f, cfg.x0, cfg.R_cd, cfg.cd, cfg.kind, t > 0.0 ? t : 1.0);

  const double m = region_min(u, ball(cfg.kind, cfg.x0, cfg.R_pd));
  rec.pd = check_power_decay(u, f, cfg.x0, cfg.R_pd, cfg.pd, cfg.kind, m > 0.0 ? m : 1.0);
  return rec;
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg) {
  if (cfg.runs < 1) throw InvalidParameter("ensemble needs at least one run");
  const pde::Grid grid = pde::Grid::make(cfg.window, cfg.n, cfg.n);
  EnsembleResult res;
  for (int k = 0; k < cfg.runs; ++k) {
    const std::uint64_t seed = cfg.seed * 1000 + static_cast<std::uint64_t>(k);
    Problem pr = make_problem(ProblemFamily::Positive, grid, seed, cfg.f_amplitude, cfg.patches);
    pde::Solution sol = pde::solve_dirichlet(pr.coeffs, pr.f, pr.boundary);
    RunRecord rec = evaluate_run(cfg, sol.u, pr.f, seed);
    rec.residual = sol.residual_norm;
    if (!rec.discarded) {
      ++res.kept;
      if (std::isfinite(rec.quotient)) res.max_quotient = std::max(res.max_quotient, rec.quotient);
      res.db_nonvacuous += rec.db.vacuous() ? 0 : 1;
      res.cd_nonvacuous += rec.cd.vacuous() ? 0 : 1;
      res.pd_nonvacuous += rec.pd.vacuous() ? 0 : 1;
      res.all_pass = res.all_pass && rec.db.passed() && rec.cd.passed() && rec.pd.passed() && std::isfinite(rec.quotient);
    }
    res.runs.push_back(std::move(rec));
  }
  return res;
}

AbpStudy run_abp_study(const AbpConfig& cfg) {
  const pde::Grid grid = pde::Grid::make(cfg.window, cfg.n, cfg.n);
  AbpStudy st;
  auto solve = [&](ProblemFamily fam, std::uint64_t seed) {
    Problem pr = make_problem(fam, grid, seed, cfg.amplitude);
    return std::make_pair(pde::solve_dirichlet(pr.coeffs, pr.f, pr.boundary).u, pr.f);
  };
  double worst = 0.0;
  for (int k = 0; k < cfg.calibration_runs; ++k) {
    auto [u, f] = solve(ProblemFamily::Supersolution, cfg.seed * 1000 + 500 + static_cast<std::uint64_t>(k));
    pde::AbpReport a = pde::check_abp(u, f, 1.0);
    double ratio = a.weighted_norm > 0.0 ? a.sup_negative / (a.diameter * a.weighted_norm) : 0.0;
    st.calibration_ratios.push_back(ratio);
    worst = std::max(worst, ratio);
  }
  st.fitted_C = cfg.safety * worst;
  st.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.test_runs; ++k) {
    auto [u, f] = solve(ProblemFamily::Supersolution, cfg.seed * 1000 + static_cast<std::uint64_t>(k));
    st.supersolution.push_back(pde::check_abp(u, f, st.fitted_C));
    st.min_margin = std::min(st.min_margin, st.supersolution.back().margin);
  }
  for (int k = 0; k < cfg.homogeneous_runs; ++k) {
    auto [u, f] = solve(ProblemFamily::Homogeneous, cfg.seed * 1000 + 700 + static_cast<std::uint64_t>(k));
    double neg = pde::check_abp(u, f, 0.0).sup_negative;
    st.homogeneous_sup_negative.push_back(neg);
    st.max_homogeneous_negative = std::max(st.max_homogeneous_negative, neg);
  }
  return st;
}

ClosureResult family_closure(const EnsembleConfig& cfg, const std::vector<double>& lambdas, int runs) {
  const pde::Grid grid = pde::Grid::make(cfg.window, cfg.n, cfg.n);
  ClosureResult res;
  res.lambdas = lambdas;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  auto compare = [&](const RunRecord& base, const RunRecord& r) {
    ++res.comparisons;
    bool same = base.discarded == r.discarded;
    if (!base.discarded && !r.discarded) {
      same = same && base.db.passed() == r.db.passed() && base.cd.passed() == r.cd.passed() &&
             base.pd.passed() == r.pd.passed() && base.db.status == r.db.status && base.cd.status == r.cd.status &&
             base.pd.status == r.pd.status;
      if (std::isfinite(base.quotient) && std::isfinite(r.quotient))
        res.max_quotient_defect = std::max(res.max_quotient_defect, rel(r.quotient, base.quotient));
      if (!base.db.vacuous() && !r.db.vacuous())
        res.max_margin_defect =
            std::max(res.max_margin_defect, rel(r.db.value("inf_ratio"), base.db.value("inf_ratio")));
    }
    if (!same) ++res.flag_mismatches;
  };
  for (int k = 0; k < runs; ++k) {
    const std::uint64_t seed = cfg.seed * 1000 + static_cast<std::uint64_t>(k);
    Problem pr = make_problem(ProblemFamily::Positive, grid, seed, cfg.f_amplitude, cfg.patches);
    GridFunction u = pde::solve_dirichlet(pr.coeffs, pr.f, pr.boundary).u;
    const double top = *std::max_element(u.values.begin(), u.values.end());
    GridFunction flipped = u;
    for (auto& v : flipped.values) v = top - v;
    GridFunction neg_f = -1.0 * pr.f;
    RunRecord base = evaluate_run(cfg, u, pr.f, seed);
    RunRecord base_flip = evaluate_run(cfg, flipped, neg_f, seed);
    for (double lam : lambdas) {
      compare(base, evaluate_run(cfg, lam * u, lam * pr.f, seed));
      compare(base_flip, evaluate_run(cfg, lam * flipped, lam * neg_f, seed));
    }
  }
  return res;
}

}  // namespace hlab::harness
