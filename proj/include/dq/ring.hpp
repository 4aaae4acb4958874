#pragma once

#include "dq/formal.hpp"
#include "dq/timefun.hpp"

namespace dq {

// Uniform helpers so the torus/Weyl layers can be instantiated over either
// static coefficients (FormalScalar) or loop-time families (TimeFun).

inline FormalScalar ring_zero(int order, const FormalScalar *) { return FormalScalar(order); }
inline TimeFun ring_zero(int order, const TimeFun *) { return TimeFun(order); }

template <class S>
S ring_zero_of(int order) {
  return ring_zero(order, static_cast<const S *>(nullptr));
}

inline FormalScalar scale_f(const FormalScalar &a, const FormalScalar &s) { return a * s; }
inline TimeFun scale_f(const TimeFun &a, const FormalScalar &s) { return a.scaled(s); }

inline FormalScalar to_scalar(const FormalScalar &a) { return a; }
inline TimeFun to_time(const FormalScalar &a) { return TimeFun::constant(a); }
inline const TimeFun &to_time(const TimeFun &a) { return a; }

}  // namespace dq
