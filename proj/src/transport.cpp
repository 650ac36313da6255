#include "microstack/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "microstack/electrochem.hpp"

namespace microstack::transport {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// Entire-function forms of cos(sqrt(nu) y) and sin(sqrt(nu) y)/sqrt(nu);
// analytic across nu = 0 (hyperbolic for nu < 0).
double entire_c(double nu) {
  if (nu > 1e-8) return std::cos(std::sqrt(nu));
  if (nu < -1e-8) return std::cosh(std::sqrt(-nu));
  return 1.0 - nu / 2.0 + nu * nu / 24.0;
}

double entire_s(double nu) {
  if (nu > 1e-8) {
    const double s = std::sqrt(nu);
    return std::sin(s) / s;
  }
  if (nu < -1e-8) {
    const double m = std::sqrt(-nu);
    return std::sinh(m) / m;
  }
  return 1.0 - nu / 6.0 + nu * nu / 120.0;
}

double entire_c_at(double nu, double y) { return entire_c(nu * y * y); }
double entire_s_at(double nu, double y) { return y * entire_s(nu * y * y); }

double entire_s_prime(double nu) {
  if (std::abs(nu) > 1e-6) return (entire_c(nu) - entire_s(nu)) / (2.0 * nu);
  return -1.0 / 6.0 + nu / 60.0 - nu * nu / 1680.0;
}

struct Characteristic {
  double b0, b1;
  double p() const { return b0 * b1; }
  double sum() const { return b0 + b1; }

  double value(double nu) const {
    return (nu - p()) * entire_s(nu) + sum() * entire_c(nu);
  }
  double derivative(double nu) const {
    return entire_s(nu) + (nu - p()) * entire_s_prime(nu) - sum() * entire_s(nu) / 2.0;
  }
  double psi(double nu, double y) const {
    return entire_c_at(nu, y) - b0 * entire_s_at(nu, y);
  }
};

double refine_root(const Characteristic& ch, double a, double b) {
  double fa = ch.value(a);
  double fb = ch.value(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b));
       ++it) {
    const double m = 0.5 * (a + b);
    const double fm = ch.value(m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  // Newton polish inside the bracket.
  double x = 0.5 * (a + b);
  for (int it = 0; it < 4; ++it) {
    const double f = ch.value(x);
    const double d = ch.derivative(x);
    if (d == 0.0) break;
    const double xn = x - f / d;
    if (xn <= a || xn >= b) break;
    x = xn;
  }
  return x;
}

std::vector<double> find_eigenvalues(const Characteristic& ch, int count) {
  std::vector<double> roots;
  const double scale = std::max({1.0, std::abs(ch.p()), std::abs(ch.sum())});

  // Growth modes exist only when a boundary produces mass (positive Robin
  // number after the migration shift).
  const double pos = std::max({ch.b0, ch.b1, 0.0});
  if (pos > 0.0) {
    const double mu_max = 2.0 * pos + 6.0;
    const int n = 512;
    double prev_nu = -1e-300;
    double prev_g = ch.value(prev_nu);
    for (int i = 1; i <= n; ++i) {
      const double mu = mu_max * i / n;
      const double nu = -mu * mu;
      const double g = ch.value(nu);
      if ((prev_g < 0.0) != (g < 0.0)) roots.push_back(refine_root(ch, nu, prev_nu));
      prev_nu = nu;
      prev_g = g;
    }
  }

  if (std::abs(ch.value(0.0)) <= 1e-13 * scale) roots.push_back(0.0);

  for (int attempt = 0; attempt < 2 && static_cast<int>(roots.size()) < count;
       ++attempt) {
    // Re-scan positive axis, wider on the second attempt.
    roots.erase(std::remove_if(roots.begin(), roots.end(),
                               [](double r) { return r > 0.0; }),
                roots.end());
    const double s_max = (count + 3.0) * kPi * (attempt == 0 ? 1.0 : 2.0);
    const double ds = kPi / 64.0;
    double prev_s = 1e-9;
    double prev_g = ch.value(prev_s * prev_s);
    for (double s = ds; s <= s_max; s += ds) {
      const double g = ch.value(s * s);
      if (g == 0.0) {
        roots.push_back(s * s);
      } else if ((prev_g < 0.0) != (g < 0.0)) {
        roots.push_back(refine_root(ch, prev_s * prev_s, s * s));
      }
      prev_s = s;
      prev_g = g;
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) {
                              return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b));
                            }),
                roots.end());
  }
  if (static_cast<int>(roots.size()) < count) {
    throw EigenvalueBracketFailure("eigenvalue isolation failed (extreme q/D)");
  }
  roots.resize(count);
  return roots;
}

double clamp_exp_arg(double x) { return std::clamp(x, -60.0, 700.0); }

double decay_factor(double lambda, double tau) {
  return std::exp(-clamp_exp_arg(lambda * tau));
}

// (1 - exp(-x))/x, the along-section average of exp(-lambda tau(x)).
double average_decay(double lambda, double tau) {
  const double x = clamp_exp_arg(lambda * tau);
  if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

uint64_t quantize_component(double v) {
  if (v == 0.0) return 0;
  int e = 0;
  const double m = std::frexp(v, &e);
  const auto qm = static_cast<int64_t>(std::llround(m * 1e10));
  return (static_cast<uint64_t>(static_cast<uint32_t>(e)) << 40) ^
         static_cast<uint64_t>(qm + (int64_t{1} << 36));
}

uint64_t cache_key(double bi0, double bi1, double beta_hat) {
  uint64_t h = 1469598103934665603ull;
  for (uint64_t part :
       {quantize_component(bi0), quantize_component(bi1), quantize_component(beta_hat)}) {
    h ^= part;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

double ConcentrationProfile::evaluate(double ystar) const {
  double c = 0.0;
  for (int k = 0; k < modes(); ++k) c += coeffs[k] * std::cos(k * kPi * ystar);
  return c;
}

double ConcentrationProfile::min_sampled(int samples) const {
  double lo = evaluate(0.0);
  for (int i = 1; i < samples; ++i) {
    lo = std::min(lo, evaluate(static_cast<double>(i) / (samples - 1)));
  }
  return lo;
}

TransportContext::TransportContext(TransportOptions opts) : opts_(opts) {
  if (opts_.modes < 1) throw ConfigError("transport modes must be >= 1");
  const int panels = opts_.quad_panels > 0 ? opts_.quad_panels : 2 * opts_.modes;
  const int nq = 8 * panels;
  nodes_.resize(nq);
  weights_.resize(nq);
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < 8; ++i) {
      nodes_[p * 8 + i] = (p + 0.5 * (1.0 + kGlNodes[i])) * h;
      weights_[p * 8 + i] = 0.5 * h * kGlWeights[i];
    }
  }
  const int k = opts_.modes;
  cos_table_.resize(k, nq);
  fproj_.resize(k, nq);
  for (int j = 0; j < k; ++j) {
    for (int q = 0; q < nq; ++q) {
      const double c = std::cos(j * kPi * nodes_[q]);
      cos_table_(j, q) = c;
      fproj_(j, q) = (j == 0 ? 1.0 : 2.0) * weights_[q] * c;
    }
  }
}

Eigen::VectorXd TransportContext::values_at_nodes(const ConcentrationProfile& p) const {
  Eigen::Map<const Eigen::VectorXd> a(p.coeffs.data(), p.modes());
  return cos_table_.topRows(p.modes()).transpose() * a;
}

std::vector<double> TransportContext::fourier_from_values(const Eigen::VectorXd& v) const {
  Eigen::VectorXd a = fproj_ * v;
  return std::vector<double>(a.data(), a.data() + a.size());
}

EigenSystemPtr build_electrode_eigensystem(const TransportContext& ctx, double bi0,
                                           double bi1, double beta_hat) {
  auto es = std::make_shared<EigenSystem>();
  es->bi0 = bi0;
  es->bi1 = bi1;
  es->beta_hat = beta_hat;
  es->beta = 0.5 * beta_hat;
  const int k = ctx.modes();

  if (bi0 == 0.0 && bi1 == 0.0 && beta_hat == 0.0) {
    es->fourier = true;
    es->lambda.resize(k);
    for (int i = 0; i < k; ++i) es->lambda[i] = (i * kPi) * (i * kPi);
    es->nu = es->lambda;
    return es;
  }

  // Transformed Robin numbers after c = exp(-beta y) v.
  const Characteristic ch{bi0 + es->beta, bi1 - es->beta};
  es->robin0 = ch.b0;
  es->nu = find_eigenvalues(ch, k);

  const int nq = ctx.num_nodes();
  es->lambda.resize(k);
  es->psi_end.resize(k);
  es->norm.resize(k);
  es->mean_weight.resize(k);
  es->proj.resize(k, nq);
  es->recon.resize(k, nq);
  const auto& y = ctx.nodes();
  const auto& w = ctx.weights();
  for (int i = 0; i < k; ++i) {
    const double nu = es->nu[i];
    es->lambda[i] = nu + es->beta * es->beta;
    es->psi_end[i] = ch.psi(nu, 1.0);
    double nrm = 0.0;
    double mean = 0.0;
    for (int q = 0; q < nq; ++q) {
      const double psi = ch.psi(nu, y[q]);
      es->recon(i, q) = std::exp(-es->beta * y[q]) * psi;
      es->proj(i, q) = w[q] * std::exp(es->beta * y[q]) * psi;
      nrm += w[q] * psi * psi;
      mean += w[q] * es->recon(i, q);
    }
    es->norm[i] = nrm;
    es->mean_weight[i] = mean;
    es->proj.row(i) /= nrm;
  }
  return es;
}

double EigenSystem::psi_value(int k, double y) const {
  if (fourier) return std::cos(k * kPi * y);
  return entire_c_at(nu[k], y) - robin0 * entire_s_at(nu[k], y);
}

EigenSystemPtr TransportContext::electrode_system(double bi0, double bi1,
                                                  double beta_hat) const {
  const uint64_t key = cache_key(bi0, bi1, beta_hat);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  EigenSystemPtr es = build_electrode_eigensystem(*this, bi0, bi1, beta_hat);
  std::lock_guard<std::mutex> lock(mu_);
  if (cache_.size() > 512) cache_.clear();
  cache_[key] = es;
  return es;
}

ConcentrationProfile project_inlet_step(SpeciesId species, double lo, double hi,
                                        double ratio, InletAnchor anchor, int modes,
                                        double width) {
  if (ratio < 0.0 || ratio > 1.0) throw ConfigError("step ratio outside [0,1]");
  ConcentrationProfile p;
  p.species = species;
  p.width = width;
  p.coeffs.assign(modes, 0.0);
  p.coeffs[0] = ratio * hi + (1.0 - ratio) * lo;
  const double step = hi - lo;
  for (int k = 1; k < modes; ++k) {
    double a = 2.0 * step * std::sin(k * kPi * ratio) / (k * kPi);
    if (anchor == InletAnchor::High && (k % 2 == 1)) a = -a;
    p.coeffs[k] = a;
  }
  return p;
}

void propagate_wall(ConcentrationProfile& p, double dx, double u, double diffusion) {
  const double tau = diffusion * dx / (u * p.width * p.width);
  for (int k = 1; k < p.modes(); ++k) {
    p.coeffs[k] *= decay_factor((k * kPi) * (k * kPi), tau);
  }
}

SectionPropagation propagate_electrode(const TransportContext& ctx,
                                       const ConcentrationProfile& p, double dx,
                                       double u, double diffusion,
                                       const EigenSystem& es) {
  SectionPropagation r;
  const double tau = diffusion * dx / (u * p.width * p.width);

  if (es.fourier) {
    r.out = p;
    double end0 = 0, end1 = 0, avg0 = 0, avg1 = 0;
    for (int k = 0; k < p.modes(); ++k) {
      const double lam = es.lambda[k];
      const double fac = k == 0 ? 1.0 : decay_factor(lam, tau);
      r.out.coeffs[k] = p.coeffs[k] * fac;
      const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      end0 += r.out.coeffs[k];
      end1 += sgn * r.out.coeffs[k];
      const double av = p.coeffs[k] * (k == 0 ? 1.0 : average_decay(lam, tau));
      avg0 += av;
      avg1 += sgn * av;
    }
    r.surf_end[0] = end0;
    r.surf_end[1] = end1;
    r.surf_avg[0] = avg0;
    r.surf_avg[1] = avg1;
    return r;
  }

  const Eigen::VectorXd cv = ctx.values_at_nodes(p);
  const Eigen::VectorXd b = es.proj * cv;
  const int k = es.modes();
  Eigen::VectorXd bf(k);
  double end0 = 0, end1 = 0, avg0 = 0, avg1 = 0;
  for (int i = 0; i < k; ++i) {
    const double fac = decay_factor(es.lambda[i], tau);
    bf[i] = b[i] * fac;
    const double ba = b[i] * average_decay(es.lambda[i], tau);
    end0 += bf[i] * es.surface_value(i, 0);
    end1 += bf[i] * es.surface_value(i, 1);
    avg0 += ba * es.surface_value(i, 0);
    avg1 += ba * es.surface_value(i, 1);
  }
  r.surf_end[0] = end0;
  r.surf_end[1] = end1;
  r.surf_avg[0] = avg0;
  r.surf_avg[1] = avg1;

  const Eigen::VectorXd cv_out = es.recon.transpose() * bf;
  r.out.species = p.species;
  r.out.width = p.width;
  r.out.coeffs = ctx.fourier_from_values(cv_out);
  return r;
}

double electrolyte_potential_drop(double j_geo, double width, double d_oh,
                                  double c_oh_mean, const PhysicalConstants& k) {
  if (j_geo == 0.0) return 0.0;
  const double c = std::max(c_oh_mean, electrochem::kConcFloor);
  const double kappa =
      k.faraday * k.faraday * d_oh * c / (k.gas_constant * k.t_ref);
  return -j_geo * width / kappa;
}

namespace {

const HalfReaction& reaction_for(SideKind kind) {
  static const HalfReaction hor = anode_hor();
  static const HalfReaction orr = cathode_orr();
  return kind == SideKind::Anode ? hor : orr;
}

struct SideCoupling {
  int theta = 0;
  int n = 0;
  double active_area = 0.0;
};

SideCoupling side_coupling(const ParameterSet& params, SideKind kind, SpeciesId s) {
  SideCoupling sc;
  if (kind == SideKind::Wall) return sc;
  const HalfReaction& rx = reaction_for(kind);
  sc.theta = rx.stoich_of(s);
  sc.n = rx.n_electrons;
  sc.active_area = (kind == SideKind::Anode ? params.anode : params.cathode)
                       .active_area_ratio;
  return sc;
}

}  // namespace

SectionResult consistent_electrode_section(
    const TransportContext& ctx, const ParameterSet& params,
    const PerSpecies<ConcentrationProfile>& in, const ElectrodeSectionSpec& spec,
    const PerSpecies<std::array<double, 2>>* warm_c_tilde) {
  SectionResult res;
  const double f = params.constants.faraday;
  const double rt = params.constants.gas_constant * params.constants.t_ref;
  const double floor = electrochem::kConcFloor;
  const auto& o = ctx.options();

  for (SpeciesId sid : kAllSpecies) {
    const int si = static_cast<int>(sid);
    const Species& sp = params.species[sid];
    const ConcentrationProfile& p = in[si];
    const double w = p.width;
    auto& st = res.species[si];

    const SideCoupling cb = side_coupling(params, spec.bottom, sid);
    const SideCoupling ct = side_coupling(params, spec.top, sid);
    const double beta_hat =
        (sp.valence != 0 && spec.j_geo != 0.0)
            ? sp.valence * f * spec.delta_phi / rt
            : 0.0;

    const bool reacts =
        spec.j_geo != 0.0 && (cb.theta != 0 || ct.theta != 0);

    if (!reacts && beta_hat == 0.0) {
      // Pure diffusion; identical to a wall section.
      auto es = ctx.electrode_system(0.0, 0.0, 0.0);
      res.propagation[si] =
          propagate_electrode(ctx, p, spec.dx, spec.u, sp.diffusion, *es);
      res.profiles[si] = res.propagation[si].out;
      res.systems[si] = es;
      st.iterations = 1;
      continue;
    }

    double ctb = std::max(floor, p.evaluate(0.0));
    double ctt = std::max(floor, p.evaluate(1.0));
    if (warm_c_tilde) {
      const auto& warm = (*warm_c_tilde)[si];
      if (warm[0] > 0.0) ctb = std::max(floor, warm[0]);
      if (warm[1] > 0.0) ctt = std::max(floor, warm[1]);
    }

    SectionPropagation prop;
    EigenSystemPtr es;
    bool converged = !reacts;
    int it = 0;
    double qb = 0.0, qt = 0.0;
    for (it = 1; it <= o.bc_max_iters; ++it) {
      // Eq. 11 with A^e j = j_geo: q = A theta j / (n F c~).
      qb = cb.theta != 0 ? cb.theta * spec.j_geo / (cb.n * f * ctb) : 0.0;
      qt = ct.theta != 0 ? ct.theta * spec.j_geo / (ct.n * f * ctt) : 0.0;
      es = ctx.electrode_system(qb * w / sp.diffusion, qt * w / sp.diffusion,
                                beta_hat);
      prop = propagate_electrode(ctx, p, spec.dx, spec.u, sp.diffusion, *es);
      if (!reacts) {
        converged = true;
        break;
      }
      const double nb = std::max(prop.surf_avg[0], floor);
      const double nt = std::max(prop.surf_avg[1], floor);
      double delta = 0.0;
      if (cb.theta != 0) delta = std::max(delta, std::abs(nb - ctb) / ctb);
      if (ct.theta != 0) delta = std::max(delta, std::abs(nt - ctt) / ctt);
      if (cb.theta != 0) ctb = std::max(floor, ctb + o.bc_damping * (nb - ctb));
      if (ct.theta != 0) ctt = std::max(floor, ctt + o.bc_damping * (nt - ctt));
      if (delta <= o.bc_tol) {
        converged = true;
        break;
      }
    }

    st.bottom = {qb, ctb};
    st.top = {qt, ctt};
    if (cb.theta != 0) {
      st.reaction_rate[0] = cb.theta * spec.j_geo / (cb.n * f);
    }
    if (ct.theta != 0) {
      st.reaction_rate[1] = ct.theta * spec.j_geo / (ct.n * f);
    }
    st.converged = converged;
    st.iterations = std::min(it, o.bc_max_iters);
    res.converged = res.converged && converged;
    res.propagation[si] = prop;
    res.profiles[si] = prop.out;
    res.systems[si] = es;
  }
  return res;
}

std::vector<ConcentrationProfile> split_profile(const TransportContext& ctx,
                                                const ConcentrationProfile& p,
                                                const std::vector<double>& fractions) {
  double sum = 0.0;
  for (double r : fractions) {
    if (!(r > 0.0)) throw ConfigError("split fractions must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");

  const auto& y = ctx.nodes();
  const auto& wq = ctx.weights();
  const int nq = ctx.num_nodes();
  const int k = ctx.modes();

  std::vector<ConcentrationProfile> out;
  out.reserve(fractions.size());
  double offset = 0.0;
  for (double r : fractions) {
    Eigen::VectorXd cv(nq);
    for (int q = 0; q < nq; ++q) cv[q] = p.evaluate(offset + r * y[q]);
    ConcentrationProfile child;
    child.species = p.species;
    child.width = p.width;
    child.coeffs.assign(k, 0.0);
    for (int j = 0; j < k; ++j) {
      double a = 0.0;
      for (int q = 0; q < nq; ++q) a += wq[q] * cv[q] * std::cos(j * kPi * y[q]);
      child.coeffs[j] = (j == 0 ? 1.0 : 2.0) * a;
    }
    out.push_back(std::move(child));
    offset += r;
  }
  return out;
}

ConcentrationProfile merge_profiles(const TransportContext& ctx,
                                    const std::vector<ConcentrationProfile>& ps,
                                    const std::vector<double>& flows) {
  if (ps.size() < 2 || ps.size() != flows.size()) {
    throw ConfigError("merge needs >= 2 profiles with matching flow rates");
  }
  double qtot = 0.0;
  for (double q : flows) {
    if (!(q > 0.0)) throw ConfigError("merge flow rates must be positive");
    qtot += q;
  }

  const auto& y = ctx.nodes();
  const auto& wq = ctx.weights();
  const int nq = ctx.num_nodes();
  const int k = ctx.modes();

  ConcentrationProfile merged;
  merged.species = ps[0].species;
  merged.width = ps[0].width;
  merged.coeffs.assign(k, 0.0);

  double offset = 0.0;
  for (size_t i = 0; i < ps.size(); ++i) {
    const double r = flows[i] / qtot;
    for (int q = 0; q < nq; ++q) {
      const double cval = ps[i].evaluate(y[q]);
      const double ymap = offset + r * y[q];
      merged.coeffs[0] += r * wq[q] * cval;
      for (int j = 1; j < k; ++j) {
        merged.coeffs[j] += 2.0 * r * wq[q] * cval * std::cos(j * kPi * ymap);
      }
    }
    offset += r;
  }
  return merged;
}

}  // namespace microstack::transport
