#include "lrp/montecarlo.hpp"

#include <cmath>
#include <sstream>

#include "lrp/coupling.hpp"
#include "lrp/errors.hpp"
#include "lrp/parallel.hpp"

namespace lrp {

namespace {

void require_replicas(std::size_t replicas, const char* where) {
  if (replicas == 0) throw Error(ErrorKind::kValidation, where, "replicas must be >= 1");
}

EstimateReport summarize(const std::vector<double>& xs, std::uint64_t seed0, int n) {
  EstimateReport r;
  r.replicas = xs.size();
  r.seed0 = seed0;
  r.n = n;
  long double sum = 0.0L;
  for (double x : xs) sum += x;
  const long double mean = sum / static_cast<long double>(xs.size());
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  r.estimate = static_cast<double>(mean);
  if (xs.size() > 1) {
    r.stderr_ = static_cast<double>(std::sqrt(ss / static_cast<long double>(xs.size() - 1)) /
                                    std::sqrt(static_cast<long double>(xs.size())));
  }
  return r;
}

}  // namespace

bool reaches_boundary(const RegionGraph& g, const MarkSource& marks) {
  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::vector<std::uint32_t> queue{g.origin()};
  seen[g.origin()] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto v = queue[head];
    if (g.tail_probability(v) > 0.0 && boundary_open(g, marks, v)) return true;
    for (auto id : g.out_edges(v)) {
      const auto w = g.other(id, v);
      if (!seen[w] && marks.edge_mark(id, Channel::kU) <= g.edge(id).j) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return false;
}

EstimateReport estimate_theta(const RegionGraph& g, std::size_t replicas, std::uint64_t seed0, unsigned workers) {
  require_replicas(replicas, "montecarlo.estimate_theta");
  const auto hits = map_replicas<double>(replicas, workers, [&](std::size_t i) {
    return reaches_boundary(g, FieldMarks(g, MarkField(seed0 + i))) ? 1.0 : 0.0;
  });
  return summarize(hits, seed0, g.region().radius());
}

EstimateReport estimate_theta(const Kernel& j, int n, std::size_t replicas, std::uint64_t seed0, unsigned workers) {
  require_replicas(replicas, "montecarlo.estimate_theta");
  return estimate_theta(RegionGraph(j, default_region(j, n)), replicas, seed0, workers);
}

EstimateReport estimate_susceptibility(const Kernel& j, int n, std::size_t replicas, std::uint64_t seed0,
                                       unsigned workers) {
  require_replicas(replicas, "montecarlo.estimate_susceptibility");
  const RegionGraph g(j, default_region(j, n));
  const auto sizes = map_replicas<double>(replicas, workers, [&](std::size_t i) {
    const FieldMarks m(g, MarkField(seed0 + i));
    return static_cast<double>(
        cluster_of(g, [&](std::uint32_t id) { return m.edge_mark(id, Channel::kU) <= g.edge(id).j; }).size());
  });
  return summarize(sizes, seed0, n);
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

DecayFit estimate_decay(const Kernel& j, const std::vector<int>& n_list, std::size_t replicas,
                        std::uint64_t seed0, unsigned workers) {
  DecayFit fit;
  std::vector<double> xs, ys;
  for (int n : n_list) {
    const auto r = estimate_theta(j, n, replicas, seed0, workers);
    fit.points.push_back(r);
    if (r.estimate <= 0.0) {
      fit.dropped.push_back(n);
      continue;
    }
    xs.push_back(n);
    ys.push_back(std::log(r.estimate));
  }
  if (xs.size() < 3) {
    throw Error(ErrorKind::kFit, "montecarlo.estimate_decay",
                "fewer than 3 radii with a positive estimate (" + std::to_string(xs.size()) + ")");
  }
  const auto f = least_squares(xs, ys);
  fit.slope = f.slope;
  fit.intercept = f.intercept;
  fit.r2 = f.r2;
  return fit;
}

Bisection bisect_crossing(const std::function<Kernel(double)>& kernel, int n, double lo, double hi,
                          std::size_t replicas, double target, double tol, std::uint64_t seed0, unsigned workers) {
  const char* where = "montecarlo.bisect";
  require_replicas(replicas, where);
  if (!(hi > lo) || !(tol > 0.0)) throw Error(ErrorKind::kValidation, where, "need lo < hi and tol > 0");
  Bisection b;
  b.lo = lo;
  b.hi = hi;
  if (hi - lo <= tol) {
    b.estimate = 0.5 * (lo + hi);
    return b;
  }
  auto eval = [&](double x) {
    const auto k = kernel(x);
    const auto r = estimate_theta(k, n, replicas, seed0, workers);
    b.evaluations.push_back({n, x, r.estimate, r.stderr_});
    return r.estimate;
  };
  if (eval(hi) < target) {
    std::ostringstream os;
    os << "theta_n(" << hi << ") = " << b.evaluations.back().theta << " stays below " << target;
    throw Error(ErrorKind::kBracketing, where, os.str());
  }
  while (b.hi - b.lo > tol) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (eval(mid) >= target) {
      b.hi = mid;
    } else {
      b.lo = mid;
    }
  }
  b.estimate = 0.5 * (b.lo + b.hi);
  return b;
}

Kernel PhiFamily::at(double beta) const {
  if (table) {
    Kernel::Entries e;
    for (const auto& [z, phi] : *table) e.emplace_back(z, -std::expm1(-beta * phi));
    return Kernel::table(d, orientation, e);
  }
  return Kernel::polynomial_phi(d, orientation, beta, alpha);
}

Bisection bisect_beta_c(const PhiFamily& family, int n, std::size_t replicas, double theta_target, double tol,
                        double beta_max, std::uint64_t seed0, unsigned workers) {
  return bisect_crossing([&](double beta) { return family.at(beta); }, n, 0.0, beta_max, replicas, theta_target,
                         tol, seed0, workers);
}

namespace {

double crossing_se(const std::function<Kernel(double)>& kernel, int n, const Bisection& b, std::size_t replicas,
                   std::uint64_t seed0, unsigned workers) {
  const double width = b.hi - b.lo;
  const double s = b.estimate;
  const double up = estimate_theta(kernel(s * 1.05), n, replicas, seed0, workers).estimate;
  const double down = estimate_theta(kernel(s * 0.95), n, replicas, seed0, workers).estimate;
  const double slope = (up - down) / (0.1 * s);
  const double binom = std::sqrt(0.25 / static_cast<double>(replicas));
  const double noise = slope > 0 ? binom / slope : std::numeric_limits<double>::infinity();
  return std::sqrt(width * width / 12.0 + noise * noise);
}

}  // namespace

SeparationReport monotonicity_experiment(const Kernel& j, const Kernel& jp, const std::vector<int>& n_list,
                                         std::size_t replicas, std::uint64_t seed0, double s_max, double tol,
                                         unsigned workers) {
  delta_of(j, jp);
  SeparationReport rep;
  rep.replicas = replicas;
  rep.seed0 = seed0;
  auto scaled = [](const Kernel& k) {
    return [k](double s) { return Kernel::product_scaled(k, s); };
  };
  const auto kj = scaled(j);
  const auto kjp = scaled(jp);
  for (int n : n_list) {
    SeparationRow row;
    row.n = n;
    row.s_j = bisect_crossing(kj, n, 0.0, s_max, replicas, 0.5, tol, seed0, workers);
    row.s_jp = bisect_crossing(kjp, n, 0.0, s_max, replicas, 0.5, tol, seed0, workers);
    row.se_j = crossing_se(kj, n, row.s_j, replicas, seed0, workers);
    row.se_jp = crossing_se(kjp, n, row.s_jp, replicas, seed0, workers);
    row.gap = row.s_jp.estimate - row.s_j.estimate;
    row.gap_se = std::sqrt(row.se_j * row.se_j + row.se_jp * row.se_jp);
    row.z = row.gap / row.gap_se;
    rep.rows.push_back(row);
  }
  return rep;
}

std::string to_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream os;
  os.precision(17);
  os << "n,parameter,theta,stderr\n";
  for (const auto& p : points) os << p.n << ',' << p.parameter << ',' << p.theta << ',' << p.stderr_ << '\n';
  return os.str();
}

}  // namespace lrp
