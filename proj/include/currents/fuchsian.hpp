#pragma once

// Hyperbolic structures as generator-indexed SL(2,R) matrices, the built-in
// Bolza surface in the canonical presentation, and the twist deformation
// along the separating commutator curve.

#include <complex>
#include <string>

#include "currents/mat2.hpp"
#include "currents/word.hpp"

#include <nlohmann/json.hpp>

namespace currents {

class FuchsianStructure {
 public:
  FuchsianStructure(std::string label, unsigned genus, std::vector<Mat2> generator_images)
      : label_(std::move(label)), genus_(genus) {
    if (generator_images.size() != 2 * genus)
      throw ValidationError("expected " + std::to_string(2 * genus) + " generator images");
    letters_.resize(4 * genus);
    for (unsigned i = 0; i < 2 * genus; ++i) {
      Mat2 m = generator_images[i].unit_det();
      letters_[2 * i] = m;
      letters_[2 * i + 1] = m.inv();
    }
  }

  const std::string& label() const { return label_; }
  unsigned genus() const { return genus_; }
  const Mat2& letter_image(Letter x) const { return letters_[x]; }
  Mat2 generator_image(unsigned i) const { return letters_[2 * i]; }

  Mat2 evaluate_raw(const Word& w) const {
    Mat2 m = Mat2::identity();
    for (Letter x : w) m = m * letters_[x];
    return m;
  }

  double relator_residual(const GroupPresentation& p) const {
    return evaluate_raw(p.relator()).identity_residual();
  }

 private:
  std::string label_;
  unsigned genus_;
  std::vector<Mat2> letters_;
};

inline Mat2 evaluate(const FuchsianStructure& x, const Word& w) {
  return x.evaluate_raw(w).sign_normalized();
}

// ---------------------------------------------------------------------------
// Built-in genus-2 surface from the regular hyperbolic octagon.
//
// The opposite-side pairings h0..h3 of the regular octagon (vertex angles
// pi/4) generate the Bolza group with relation h0 h1^-1 h2 h3^-1 h0^-1 h1
// h2^-1 h3 = +-I; every hi is systolic with trace 2+2*sqrt(2). The canonical
// basis below consists of four systolic elements,
//   a1 = h0, b1 = h1, a2 = h1 h2^-1 h0^-1, b2 = h0 h2 h3^-1 h0^-1,
// which satisfy [a1,b1][a2,b2] = +-I and generate the full group, so all
// four generators realize the systole 2*arccosh(1+sqrt(2)).

namespace detail {

using C2 = std::array<std::complex<double>, 4>;  // row-major complex 2x2

inline C2 cmul(const C2& x, const C2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
          x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}
inline C2 cinv(const C2& x) {
  std::complex<double> dt = x[0] * x[3] - x[1] * x[2];
  return {x[3] / dt, -x[1] / dt, -x[2] / dt, x[0] / dt};
}
inline std::complex<double> cmob(const C2& m, std::complex<double> z) {
  return (m[0] * z + m[1]) / (m[2] * z + m[3]);
}

// disk-model isometry with p -> p2, q -> q2 (equal pair distances assumed)
inline C2 disk_map_two_points(std::complex<double> p, std::complex<double> q,
                              std::complex<double> p2, std::complex<double> q2) {
  auto move_to_zero = [](std::complex<double> w) -> C2 {
    double s = 1.0 / std::sqrt(1.0 - std::norm(w));
    return {s, -w * s, -std::conj(w) * s, s};
  };
  C2 t1 = move_to_zero(p), t2 = move_to_zero(p2);
  double phi = std::arg(cmob(t2, q2)) - std::arg(cmob(t1, q));
  std::complex<double> e = std::exp(std::complex<double>(0, phi / 2));
  C2 rot{e, 0.0, 0.0, std::conj(e)};
  return cmul(cinv(t2), cmul(rot, t1));
}

// Cayley-conjugate an SU(1,1) matrix to SL(2,R)
inline Mat2 disk_to_real(const C2& m) {
  const std::complex<double> i(0, 1);
  C2 k{1.0, -i, 1.0, i};
  C2 a = cmul(cinv(k), cmul(m, k));
  std::complex<double> dt = a[0] * a[3] - a[1] * a[2];
  std::complex<double> s = std::sqrt(dt);
  for (auto& e : a) e /= s;
  double im = 0;
  for (auto& e : a) im = std::max(im, std::abs(e.imag()));
  if (im > 1e-9) throw ValidationError("disk-to-real conversion left imaginary residue");
  return Mat2{a[0].real(), a[1].real(), a[2].real(), a[3].real()}.unit_det();
}

}  // namespace detail

inline FuchsianStructure bolza_structure() {
  using namespace detail;
  const double pi = std::acos(-1.0);
  double rv = std::acosh(1.0 / (std::tan(pi / 8) * std::tan(pi / 8)));
  double re = std::tanh(rv / 2);
  std::array<std::complex<double>, 8> v;
  for (int k = 0; k < 8; ++k) v[k] = re * std::exp(std::complex<double>(0, (2 * k + 1) * pi / 8));
  auto pairing = [&](int i, int j) {  // maps side e_j onto side e_i, reversing
    return disk_map_two_points(v[j % 8], v[(j + 1) % 8], v[(i + 1) % 8], v[i % 8]);
  };
  std::array<C2, 4> h;
  for (int k = 0; k < 4; ++k) h[k] = pairing(k, k + 4);
  C2 a1 = h[0];
  C2 b1 = h[1];
  C2 a2 = cmul(h[1], cmul(cinv(h[2]), cinv(h[0])));
  C2 b2 = cmul(h[0], cmul(h[2], cmul(cinv(h[3]), cinv(h[0]))));
  FuchsianStructure s("bolza", 2,
                      {disk_to_real(a1), disk_to_real(b1), disk_to_real(a2), disk_to_real(b2)});
  GroupPresentation p(2);
  if (s.relator_residual(p) > 1e-9) throw ValidationError("bolza construction failed relator check");
  return s;
}

// Conjugate the a2,b2 images by the hyperbolic translation of displacement s
// along the axis of [a1,b1]. The translation is a matrix function of the
// commutator, so it commutes with it exactly and the relator is preserved.
inline FuchsianStructure twist_family(const FuchsianStructure& x, double s) {
  if (x.genus() != 2) throw ValidationError("twist_family requires genus 2");
  GroupPresentation p(2);
  Mat2 k = x.evaluate_raw(word_from_string("a1b1A1B1", 2));
  double t = k.trace() / 2.0;
  if (std::abs(t) <= 1.0 + 1e-12) throw ValidationError("separating commutator is not hyperbolic");
  double r = std::sqrt(t * t - 1.0);
  double ch = std::cosh(s / 2), sh = std::sinh(s / 2) / r;
  Mat2 tw{ch + sh * (k.a - t), sh * k.b, sh * k.c, ch + sh * (k.d - t)};
  tw = tw.unit_det();
  Mat2 twi = tw.inv();
  std::vector<Mat2> imgs{x.generator_image(0), x.generator_image(1),
                         (tw * x.generator_image(2)) * twi, (tw * x.generator_image(3)) * twi};
  FuchsianStructure out(x.label() + "+twist(" + std::to_string(s) + ")", 2, std::move(imgs));
  if (out.relator_residual(p) > 1e-9) throw ValidationError("twist broke the relator");
  return out;
}

// ---------------------------------------------------------------------------
// JSON schema: { "genus": g, "label": str, "images": { "a1": [4 reals], ... } }

inline nlohmann::ordered_json structure_to_json(const FuchsianStructure& x) {
  nlohmann::ordered_json j;
  j["genus"] = x.genus();
  j["label"] = x.label();
  nlohmann::ordered_json imgs;
  for (unsigned i = 0; i < 2 * x.genus(); ++i) {
    Mat2 m = x.generator_image(i);
    imgs[letter_name(Letter(2 * i))] = {m.a, m.b, m.c, m.d};
  }
  j["images"] = imgs;
  return j;
}

inline FuchsianStructure structure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("genus") || !j.contains("images"))
    throw ValidationError("representation file must contain 'genus' and 'images'");
  unsigned genus = j.at("genus").get<unsigned>();
  if (genus < 2) throw ValidationError("genus must be >= 2");
  std::string label = j.value("label", "user");
  const auto& imgs = j.at("images");
  std::vector<Mat2> mats;
  for (unsigned i = 0; i < 2 * genus; ++i) {
    std::string key = letter_name(Letter(2 * i));
    if (!imgs.contains(key)) throw ValidationError("missing image for generator " + key);
    const auto& arr = imgs.at(key);
    if (!arr.is_array() || arr.size() != 4)
      throw ValidationError("image of " + key + " must be a row-major array of 4 reals");
    mats.push_back(Mat2{arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
                        arr[3].get<double>()});
  }
  return FuchsianStructure(label, genus, std::move(mats));
}

}  // namespace currents
