// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/eadf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace posync {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kJ(0.0, 1.0);

void require_odd(int value, const char* name) {
  if (value < 1 || value % 2 == 0) {
    throw std::invalid_argument(std::string(name) + " must be a positive odd integer, got " +
                                std::to_string(value));
  }
}

CVec mode_vector(double arg, int count) {
  const int half = (count - 1) / 2;
  CVec d(count);
  for (int k = 0; k < count; ++k) {
    const double m = static_cast<double>(k - half);
    d(k) = std::exp(kJ * (m * arg));
  }
  return d;
}

CMat complex_from_json(const nlohmann::json& j) {
  const auto rows = j.size();
  if (rows == 0) return CMat(0, 0);
  const auto cols = j.at(0).size();
  CMat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j.at(r).size() != cols) throw std::invalid_argument("eadf_from_json: ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& pair = j.at(r).at(c);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::complex<double>(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  }
  return m;
}

nlohmann::json complex_to_json(const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({m(r, c).real(), m(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

CVec delay_steering(double tau, int mf, double f0) {
  require_odd(mf, "subcarrier count");
  return mode_vector(2.0 * kPi * f0 * tau, mf);
}

CVec angle_steering(double azimuth, double colatitude, int ma, int me) {
  require_odd(ma, "azimuth mode count");
  require_odd(me, "elevation mode count");
  const CVec d_az = mode_vector(azimuth, ma);
  const CVec d_el = mode_vector(colatitude, me);
  CVec out(ma * me);
  for (int e = 0; e < me; ++e) {
    out.segment(e * ma, ma) = d_el(e) * d_az;
  }
  return out;
}

Eadf synthesize_eadf(const ArrayGeometry& geom, int ma, int me, int grid_azimuth,
                     int grid_elevation, double f0, int mf) {
  geom.validate();
  require_odd(ma, "azimuth mode count");
  require_odd(me, "elevation mode count");
  require_odd(mf, "subcarrier count");
  if (grid_azimuth < ma || grid_elevation < me) {
    throw std::invalid_argument("synthesize_eadf: grid density below mode count (aliasing)");
  }
  if (!(f0 > 0.0)) throw std::invalid_argument("synthesize_eadf: f0 must be > 0");

  const int n_elem = geom.element_count();
  const int half_a = (ma - 1) / 2;
  const int half_e = (me - 1) / 2;

  // DFT basis e^{-j m phi_p} on the azimuth grid and e^{-j n theta_q} on the
  // (full-circle) colatitude grid.
  CMat basis_az(grid_azimuth, ma);
  for (int p = 0; p < grid_azimuth; ++p) {
    const double phi = 2.0 * kPi * p / grid_azimuth;
    for (int k = 0; k < ma; ++k) {
      basis_az(p, k) = std::exp(-kJ * (static_cast<double>(k - half_a) * phi));
    }
  }
  CMat basis_el(grid_elevation, me);
  for (int q = 0; q < grid_elevation; ++q) {
    const double theta = 2.0 * kPi * q / grid_elevation;
    for (int k = 0; k < me; ++k) {
      basis_el(q, k) = std::exp(-kJ * (static_cast<double>(k - half_e) * theta));
    }
  }

  Eadf eadf;
  eadf.modes_azimuth = ma;
  eadf.modes_elevation = me;
  eadf.subcarrier_spacing_hz = f0;
  eadf.subcarrier_count = mf;
  eadf.gh.resize(n_elem, ma * me);
  eadf.gv.resize(n_elem, ma * me);
  eadf.gf = CMat::Identity(mf, mf);

  const double norm = 1.0 / (static_cast<double>(grid_azimuth) * grid_elevation);
  CMat resp_h(grid_azimuth, grid_elevation), resp_v(grid_azimuth, grid_elevation);
  for (int i = 0; i < n_elem; ++i) {
    for (int p = 0; p < grid_azimuth; ++p) {
      const double phi = 2.0 * kPi * p / grid_azimuth;
      for (int q = 0; q < grid_elevation; ++q) {
        const double theta = 2.0 * kPi * q / grid_elevation;
        const auto [h, v] = element_response(geom, i, phi, theta);
        resp_h(p, q) = h;
        resp_v(p, q) = v;
      }
    }
    const CMat coeff_h = basis_az.transpose() * resp_h * basis_el * norm;  // ma x me
    const CMat coeff_v = basis_az.transpose() * resp_v * basis_el * norm;
    for (int e = 0; e < me; ++e) {
      for (int a = 0; a < ma; ++a) {
        eadf.gh(i, e * ma + a) = coeff_h(a, e);
        eadf.gv(i, e * ma + a) = coeff_v(a, e);
      }
    }
  }
  return eadf;
}

CMat polarimetric_response(const Eadf& eadf, double colatitude, double azimuth, double tau) {
  const CVec d_ang = angle_steering(azimuth, colatitude, eadf.modes_azimuth, eadf.modes_elevation);
  const CVec b_h = eadf.gh * d_ang;  // element_count
  const CVec b_v = eadf.gv * d_ang;
  const CVec d_f = eadf.gf * delay_steering(tau, eadf.subcarrier_count, eadf.subcarrier_spacing_hz);

  const int mf = eadf.subcarrier_count;
  CMat b(eadf.channel_dim(), 2);
  for (int i = 0; i < eadf.element_count(); ++i) {
    b.block(i * mf, 0, mf, 1) = b_h(i) * d_f;
    b.block(i * mf, 1, mf, 1) = b_v(i) * d_f;
  }
  return b;
}

nlohmann::json eadf_to_json(const Eadf& eadf) {
  return nlohmann::json{{"modes_azimuth", eadf.modes_azimuth},
                        {"modes_elevation", eadf.modes_elevation},
                        {"subcarrier_spacing_hz", eadf.subcarrier_spacing_hz},
                        {"subcarrier_count", eadf.subcarrier_count},
                        {"gh", complex_to_json(eadf.gh)},
                        {"gv", complex_to_json(eadf.gv)},
                        {"gf", complex_to_json(eadf.gf)}};
}

Eadf eadf_from_json(const nlohmann::json& j) {
  Eadf eadf;
  eadf.modes_azimuth = j.at("modes_azimuth").get<int>();
  eadf.modes_elevation = j.at("modes_elevation").get<int>();
  eadf.subcarrier_spacing_hz = j.at("subcarrier_spacing_hz").get<double>();
  eadf.subcarrier_count = j.at("subcarrier_count").get<int>();
  eadf.gh = complex_from_json(j.at("gh"));
  eadf.gv = complex_from_json(j.at("gv"));
  eadf.gf = complex_from_json(j.at("gf"));
  require_odd(eadf.modes_azimuth, "azimuth mode count");
  require_odd(eadf.modes_elevation, "elevation mode count");
  require_odd(eadf.subcarrier_count, "subcarrier count");
  if (eadf.gv.rows() != eadf.gh.rows() || eadf.gv.cols() != eadf.gh.cols() ||
      eadf.gh.cols() != eadf.modes_azimuth * eadf.modes_elevation ||
      eadf.gf.rows() != eadf.subcarrier_count || eadf.gf.cols() != eadf.subcarrier_count) {
    throw std::invalid_argument("eadf_from_json: inconsistent matrix shapes");
  }
  return eadf;
}

}  // namespace posync
