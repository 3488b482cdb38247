#include "tdsrobust/functional.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tdsrobust/riccati.hpp"
#include "tdsrobust/sweep.hpp"
#include "tdsrobust/sysmodel.hpp"

namespace tdsr {

namespace {

using nlohmann::json;

void check_phi(const LkFunctional& lk, const Mat& phi) {
  const int n = lk.sys.n();
  const int np = lk.disc.order + 1;
  if (phi.rows() != n || phi.cols() != np) {
    std::ostringstream os;
    os << "segment samples must be " << n << " x " << np << ", got " << phi.rows() << " x "
       << phi.cols();
    throw Error(ErrorCode::NodeMismatch, os.str());
  }
}

// (X phi)_j for the discrete quadratic form reassembled from the kernels;
// j = 0 gives v(phi).
Mat x_times_phi(const LkFunctional& lk, const Mat& phi) {
  const int n = lk.sys.n();
  const int np = lk.disc.order + 1;
  const Vec& w = lk.disc.quad_weights;
  Mat out(n, np);
  Vec head = lk.p_xx * phi.col(0);
  for (int j = 1; j < np; ++j) head += w(j) * (lk.p_xz[j] * phi.col(j));
  out.col(0) = head;
  for (int j = 1; j < np; ++j) {
    Vec col = w(j) * (lk.p_xz[j].transpose() * phi.col(0));
    for (int i = 1; i < np; ++i) col += w(j) * w(i) * (lk.p_zz[j][i] * phi.col(i));
    out.col(j) = col;
  }
  return out;
}

std::string matrix_to_string(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows.dump();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j, const char* label) {
  if (!j.is_array()) throw Error(ErrorCode::IoError, std::string(label) + ": expected an array");
  const auto nrows = j.size();
  if (nrows == 0) return Mat(0, 0);
  if (!j[0].is_array()) throw Error(ErrorCode::IoError, std::string(label) + ": expected nested rows");
  const auto ncols = j[0].size();
  Mat m(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));
  for (std::size_t i = 0; i < nrows; ++i) {
    if (!j[i].is_array() || j[i].size() != ncols)
      throw Error(ErrorCode::IoError, std::string(label) + ": ragged rows");
    for (std::size_t k = 0; k < ncols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

}  // namespace

std::pair<LkFunctional, AreSolveReport> build_functional(const TdsSystem& sys,
                                                         const PerturbationStructure& ps,
                                                         const SectorRestriction& sec,
                                                         const Discretization& disc,
                                                         double tol) {
  const int n = sys.n();
  const int np = disc.order + 1;
  const TransformedSystem t1 = transformation_one(sys, ps, sec);
  const QPair qp = q_pair(ps, t1.sector);

  for (int j = 1; j <= disc.order; ++j) {
    if (disc.quad_weights(j) < 1e-14 * disc.h) {
      std::ostringstream os;
      os << "quadrature weight " << disc.quad_weights(j) << " at node " << j
         << " too small for kernel extraction";
      throw Error(ErrorCode::IllConditionedQuadrature, os.str());
    }
  }

  const Mat a = discretize_generator(t1.system, disc);
  Mat qhat = Mat::Zero(n * np, n * np);
  qhat.topLeftCorner(n, n) = qp.q0 + qp.q1;
  const Mat r = -sec.pi_aa;
  const Mat br = ps.b * r.llt().solve(ps.b.transpose());  // b r^{-1} b'
  Mat s = Mat::Zero(n * np, n * np);
  s.topLeftCorner(n, n) = br;

  const NewtonKleinmanResult nk = newton_kleinman(a, qhat, s, tol);

  AreSolveReport report;
  report.residual = nk.residual;
  report.newton_iters = nk.iters;
  report.closed_loop_stable = nk.closed_loop_stable;
  report.n_state = n * np;

  const Mat& x = nk.x;
  const Vec& w = disc.quad_weights;
  Mat p_xx = sym(x.topLeftCorner(n, n));
  std::vector<Mat> p_xz(np);
  std::vector<std::vector<Mat>> p_zz(np, std::vector<Mat>(np));
  for (int j = 1; j < np; ++j) p_xz[j] = x.block(0, j * n, n, n) / w(j);
  for (int i = 1; i < np; ++i)
    for (int j = 1; j < np; ++j)
      p_zz[i][j] = x.block(i * n, j * n, n, n) / (w(i) * w(j));
  // node-0 samples: extrapolate the interior-node interpolant to theta = 0
  const Vec& e = disc.edge_extrap;
  Mat pxz0 = Mat::Zero(n, n);
  for (int j = 1; j < np; ++j) pxz0 += e(j - 1) * p_xz[j];
  p_xz[0] = pxz0;
  for (int j = 1; j < np; ++j) {
    Mat col0 = Mat::Zero(n, n);
    for (int i = 1; i < np; ++i) col0 += e(i - 1) * p_zz[i][j];
    p_zz[0][j] = col0;
  }
  for (int i = 0; i < np; ++i) {
    Mat row0 = Mat::Zero(n, n);
    if (i == 0) {
      for (int k = 1; k < np; ++k) row0 += e(k - 1) * p_zz[0][k];
    } else {
      for (int k = 1; k < np; ++k) row0 += e(k - 1) * p_zz[i][k];
    }
    p_zz[i][0] = row0;
  }

  return {LkFunctional(std::move(p_xx), std::move(p_xz), std::move(p_zz), qp.q1, disc, sys, ps, sec),
          report};
}

double evaluate_V(const LkFunctional& lk, const Mat& phi) {
  check_phi(lk, phi);
  const int np = lk.disc.order + 1;
  const Vec& w = lk.disc.quad_weights;
  double v0 = phi.col(0).dot(lk.p_xx * phi.col(0));
  for (int j = 1; j < np; ++j) v0 += 2.0 * w(j) * phi.col(0).dot(lk.p_xz[j] * phi.col(j));
  for (int i = 1; i < np; ++i)
    for (int j = 1; j < np; ++j)
      v0 += w(i) * w(j) * phi.col(i).dot(lk.p_zz[i][j] * phi.col(j));
  double v1 = 0.0;
  for (int j = 0; j < np; ++j) v1 += w(j) * phi.col(j).dot(lk.q1_diag * phi.col(j));
  return v0 + v1;
}

Vec evaluate_v(const LkFunctional& lk, const Mat& phi) {
  check_phi(lk, phi);
  const int np = lk.disc.order + 1;
  const Vec& w = lk.disc.quad_weights;
  Vec head = lk.p_xx * phi.col(0);
  for (int j = 1; j < np; ++j) head += w(j) * (lk.p_xz[j] * phi.col(j));
  return head;
}

double derivative_along(const LkFunctional& lk, const TdsSystem& flow_sys, const Mat& phi) {
  check_phi(lk, phi);
  const int n = lk.sys.n();
  const int np = lk.disc.order + 1;
  if (flow_sys.n() != n) throw Error(ErrorCode::DimensionMismatch, "flow system dimension");
  const Mat gen = discretize_generator(flow_sys, lk.disc);
  // phi-dot at the nodes: reshape, apply, reshape back
  Mat dphi(n, np);
  {
    Vec stacked(n * np);
    for (int j = 0; j < np; ++j) stacked.segment(j * n, n) = phi.col(j);
    const Vec dstacked = gen * stacked;
    for (int j = 0; j < np; ++j) dphi.col(j) = dstacked.segment(j * n, n);
  }
  const Mat xphi = x_times_phi(lk, phi);
  double d = 0.0;
  for (int j = 0; j < np; ++j) d += 2.0 * dphi.col(j).dot(xphi.col(j));
  // the pure-integral part differentiates to a boundary difference
  d += phi.col(0).dot(lk.q1_diag * phi.col(0));
  d -= phi.col(np - 1).dot(lk.q1_diag * phi.col(np - 1));
  return d;
}

double defining_equation_residual(const LkFunctional& lk, const Mat& phi) {
  check_phi(lk, phi);
  const double lhs = derivative_along(lk, lk.sys, phi);
  const Vec zeta = lk.ps.output(phi.col(lk.disc.order), phi.col(0));
  const Vec v = evaluate_v(lk, phi);
  const Vec xi = lk.ps.b.transpose() * v - lk.sec.pi_za.transpose() * zeta;
  const Mat r = -lk.sec.pi_aa;
  const double rhs = -zeta.dot(lk.sec.pi_zz * zeta) - xi.dot(r.llt().solve(xi));
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

PositivityProbe positivity_probe(const LkFunctional& lk, int samples, double radius,
                                 std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be > 0");
  const int n = lk.sys.n();
  const int np = lk.disc.order + 1;
  const int degree = std::max(4, lk.disc.order / 2);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.1, 1.0);

  // Chebyshev basis values T_k(x_j) on the node grid
  Mat basis(degree + 1, np);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k <= degree; ++k)
      basis(k, j) = std::cos(k * j * std::numbers::pi / lk.disc.order);

  auto random_smooth = [&]() {
    Mat coef(n, degree + 1);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k <= degree; ++k) coef(i, k) = gauss(rng) * std::pow(2.0, -k);
    return Mat(coef * basis);
  };
  auto sup_norm = [&](const Mat& phi) {
    double mx = 0.0;
    for (int j = 0; j < np; ++j) mx = std::max(mx, phi.col(j).norm());
    return mx;
  };

  PositivityProbe probe;
  bool first_cubic = true, first_raz = true, first_v = true;
  for (int sample = 0; sample < samples; ++sample) {
    Mat phi;
    bool razumikhin = (sample % 2 == 1);
    if (!razumikhin) {
      phi = random_smooth();
      const double norm = sup_norm(phi);
      if (norm > 0.0) phi *= (unif(rng) * radius) / norm;
    } else {
      // peak-at-endpoint shape: u + eps q with q(0) = 0, eps maximal subject
      // to the node norms staying below ||u||
      Vec u(n);
      for (int i = 0; i < n; ++i) u(i) = gauss(rng);
      if (u.norm() == 0.0) u.setOnes();
      u *= (unif(rng) * radius) / u.norm();
      Mat q = random_smooth();
      q.colwise() -= q.col(0);  // q(0) = 0
      double lo = 0.0, hi = 1.0;
      auto ok = [&](double eps) {
        for (int j = 1; j < np; ++j)
          if ((u + eps * q.col(j)).norm() > u.norm()) return false;
        return true;
      };
      if (ok(1.0)) {
        lo = 1.0;
      } else {
        for (int it = 0; it < 12; ++it) {
          const double mid = 0.5 * (lo + hi);
          (ok(mid) ? lo : hi) = mid;
        }
      }
      phi = Mat(n, np);
      for (int j = 0; j < np; ++j) phi.col(j) = u + lo * q.col(j);
    }
    const double v = evaluate_V(lk, phi);
    if (first_v || v < probe.min_value) probe.min_value = v;
    first_v = false;
    const double x0 = phi.col(0).norm();
    if (razumikhin) {
      if (x0 > 1e-12 * radius) {
        const double ratio = v / (x0 * x0);
        if (first_raz || ratio < probe.min_razumikhin_ratio) probe.min_razumikhin_ratio = ratio;
        first_raz = false;
        ++probe.razumikhin_samples;
      }
    } else {
      const double norm_c = sup_norm(phi);
      if (x0 > 1e-12 * radius && norm_c > 0.0) {
        const double ratio = v * norm_c / (x0 * x0 * x0);
        if (first_cubic || ratio < probe.min_cubic_ratio) probe.min_cubic_ratio = ratio;
        first_cubic = false;
        ++probe.cubic_samples;
      }
    }
  }
  return probe;
}

double upper_bound_coefficient(const LkFunctional& lk) {
  const int n = lk.sys.n();
  const int np = lk.disc.order + 1;
  const Vec& w = lk.disc.quad_weights;
  // weighted symmetric form whose spectral norm is the operator norm of P
  Mat xw(n * np, n * np);
  xw.topLeftCorner(n, n) = lk.p_xx;
  for (int j = 1; j < np; ++j) {
    const double sj = std::sqrt(w(j));
    xw.block(0, j * n, n, n) = sj * lk.p_xz[j];
    xw.block(j * n, 0, n, n) = sj * lk.p_xz[j].transpose();
  }
  for (int i = 1; i < np; ++i)
    for (int j = 1; j < np; ++j)
      xw.block(i * n, j * n, n, n) = std::sqrt(w(i) * w(j)) * lk.p_zz[i][j];
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (xw + xw.transpose()));
  const double p_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  return (lk.sys.h + 1.0) * p_norm + lk.sys.h * spectral_norm(lk.q1_diag);
}

// ---- Serialization ----------------------------------------------------------

std::string certified_triple_hash(const TdsSystem& sys, const PerturbationStructure& ps,
                                  const SectorRestriction& sec) {
  std::ostringstream os;
  os << "system:" << matrix_to_string(sys.a0) << matrix_to_string(sys.a1) << json(sys.h).dump()
     << ";structure:" << matrix_to_string(ps.b) << matrix_to_string(ps.c1)
     << matrix_to_string(ps.c0) << ";sector:" << matrix_to_string(sec.pi_zz)
     << matrix_to_string(sec.pi_za) << matrix_to_string(sec.pi_aa);
  std::ostringstream hex;
  hex << std::hex << fnv1a64(os.str());
  return hex.str();
}

void save_functional(const LkFunctional& lk, const std::string& path) {
  const int np = lk.disc.order + 1;
  json doc;
  doc["format_version"] = 1;
  doc["n"] = lk.sys.n();
  doc["order"] = lk.disc.order;
  doc["h"] = lk.sys.h;
  json nodes = json::array();
  for (int j = 0; j < np; ++j) nodes.push_back(lk.disc.nodes(j));
  doc["nodes"] = std::move(nodes);
  doc["p_xx"] = matrix_to_json(lk.p_xx);
  json pxz = json::array();
  for (int j = 0; j < np; ++j) pxz.push_back(matrix_to_json(lk.p_xz[j]));
  doc["p_xz"] = std::move(pxz);
  json pzz = json::array();
  for (int i = 0; i < np; ++i) {
    json row = json::array();
    for (int j = 0; j < np; ++j) row.push_back(matrix_to_json(lk.p_zz[i][j]));
    pzz.push_back(std::move(row));
  }
  doc["p_zz"] = std::move(pzz);
  doc["q1"] = matrix_to_json(lk.q1_diag);
  doc["system"] = {{"a0", matrix_to_json(lk.sys.a0)}, {"a1", matrix_to_json(lk.sys.a1)},
                   {"h", lk.sys.h}};
  doc["structure"] = {{"b", matrix_to_json(lk.ps.b)}, {"c1", matrix_to_json(lk.ps.c1)},
                      {"c0", matrix_to_json(lk.ps.c0)}};
  doc["sector"] = {{"pi_zz", matrix_to_json(lk.sec.pi_zz)}, {"pi_za", matrix_to_json(lk.sec.pi_za)},
                   {"pi_aa", matrix_to_json(lk.sec.pi_aa)}};
  doc["meta_hash"] = certified_triple_hash(lk.sys, lk.ps, lk.sec);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open for writing: " + path);
  out << doc.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

LkFunctional load_functional(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("functional file parse: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != 1)
      throw Error(ErrorCode::IoError, "unsupported functional format_version");
    const int order = doc.at("order").get<int>();
    const int np = order + 1;
    TdsSystem sys(matrix_from_json(doc.at("system").at("a0"), "system.a0"),
                  matrix_from_json(doc.at("system").at("a1"), "system.a1"),
                  doc.at("system").at("h").get<double>());
    PerturbationStructure ps(matrix_from_json(doc.at("structure").at("b"), "structure.b"),
                             matrix_from_json(doc.at("structure").at("c1"), "structure.c1"),
                             matrix_from_json(doc.at("structure").at("c0"), "structure.c0"));
    SectorRestriction sec(matrix_from_json(doc.at("sector").at("pi_zz"), "sector.pi_zz"),
                          matrix_from_json(doc.at("sector").at("pi_za"), "sector.pi_za"),
                          matrix_from_json(doc.at("sector").at("pi_aa"), "sector.pi_aa"));
    const Discretization disc = make_discretization(order, sys.h);
    Mat p_xx = matrix_from_json(doc.at("p_xx"), "p_xx");
    std::vector<Mat> p_xz(np);
    const json& jxz = doc.at("p_xz");
    if (jxz.size() != static_cast<std::size_t>(np))
      throw Error(ErrorCode::IoError, "p_xz node count mismatch");
    for (int j = 0; j < np; ++j) p_xz[j] = matrix_from_json(jxz[j], "p_xz");
    std::vector<std::vector<Mat>> p_zz(np, std::vector<Mat>(np));
    const json& jzz = doc.at("p_zz");
    if (jzz.size() != static_cast<std::size_t>(np))
      throw Error(ErrorCode::IoError, "p_zz grid mismatch");
    for (int i = 0; i < np; ++i) {
      if (jzz[i].size() != static_cast<std::size_t>(np))
        throw Error(ErrorCode::IoError, "p_zz grid mismatch");
      for (int j = 0; j < np; ++j) p_zz[i][j] = matrix_from_json(jzz[i][j], "p_zz");
    }
    Mat q1 = matrix_from_json(doc.at("q1"), "q1");
    LkFunctional lk(std::move(p_xx), std::move(p_xz), std::move(p_zz), std::move(q1), disc,
                    std::move(sys), std::move(ps), std::move(sec));
    const std::string stored = doc.at("meta_hash").get<std::string>();
    const std::string fresh = certified_triple_hash(lk.sys, lk.ps, lk.sec);
    if (stored != fresh)
      throw Error(ErrorCode::IoError, "meta hash mismatch: file edited or truncated");
    return lk;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("functional file structure: ") + e.what());
  }
}

}  // namespace tdsr
