#pragma once

// Shared arithmetic for the batched game kernels. The visit counts of the 18
// transient states are built by forward substitution in canonical order: the
// score graph is acyclic except for the deuce cycle, whose visit mass is the
// geometric series inflow / (1 - return probability). Win/loss mass and the
// visit-weighted average then follow by dot products.
//
// Every statement here is a correctly-rounded IEEE double op applied per lane
// and the operation order is fixed, so any pack type V (scalar, AVX2, ...)
// yields bit-identical lanes. Keep it branch-free; a non-absorbing deuce
// cycle produces inf/nan that callers detect via win + loss.

namespace tennis::kernels::detail {

// Canonical state indices.
enum : int {
  S00 = 0, S10 = 1, S01 = 2, S20 = 3, S11 = 4, S02 = 5, S30 = 6, S21 = 7, S12 = 8,
  S03 = 9, S31 = 10, S22 = 11, S13 = 12, S32 = 13, S23 = 14, S33 = 15, SA3 = 16, S3A = 17,
};

template <class V>
struct EvalResult {
  V win, loss, points, induced_avg;
};

template <class V>
inline EvalResult<V> evaluate_game(const V p[18]) {
  const V one = V::broadcast(1.0);
  V q[18];
  for (int i = 0; i < 18; ++i) q[i] = one - p[i];

  V v[18];
  v[S00] = one;
  v[S10] = v[S00] * p[S00];
  v[S01] = v[S00] * q[S00];
  v[S20] = v[S10] * p[S10];
  v[S11] = v[S10] * q[S10] + v[S01] * p[S01];
  v[S02] = v[S01] * q[S01];
  v[S30] = v[S20] * p[S20];
  v[S21] = v[S20] * q[S20] + v[S11] * p[S11];
  v[S12] = v[S11] * q[S11] + v[S02] * p[S02];
  v[S03] = v[S02] * q[S02];
  v[S31] = v[S30] * q[S30] + v[S21] * p[S21];
  v[S22] = v[S21] * q[S21] + v[S12] * p[S12];
  v[S13] = v[S12] * q[S12] + v[S03] * p[S03];
  v[S32] = v[S31] * q[S31] + v[S22] * p[S22];
  v[S23] = v[S22] * q[S22] + v[S13] * p[S13];

  const V inflow = v[S32] * q[S32] + v[S23] * p[S23];
  const V ret = p[S33] * q[SA3] + q[S33] * p[S3A];
  v[S33] = inflow / (one - ret);
  v[SA3] = v[S33] * p[S33];
  v[S3A] = v[S33] * q[S33];

  EvalResult<V> r;
  r.win = v[S30] * p[S30] + v[S31] * p[S31] + v[S32] * p[S32] + v[SA3] * p[SA3];
  r.loss = v[S03] * q[S03] + v[S13] * q[S13] + v[S23] * q[S23] + v[S3A] * q[S3A];

  V points = v[0];
  for (int i = 1; i < 18; ++i) points = points + v[i];
  V weighted = v[0] * p[0];
  for (int i = 1; i < 18; ++i) weighted = weighted + v[i] * p[i];
  r.points = points;
  r.induced_avg = weighted / points;
  return r;
}

}  // namespace tennis::kernels::detail
