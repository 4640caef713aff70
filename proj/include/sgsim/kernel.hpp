#pragma once

#include <cmath>

#if defined(__GLIBC__) && defined(__x86_64__) && !defined(SGSIM_NO_LIBMVEC)
// Re-declaring sin with a simd variant lets the compiler call the glibc
// vector math library from the lane loop below.
#pragma omp declare simd notinbranch
extern "C" double sgsim_lane_sin(double) __asm__("sin");
#define SGSIM_LANE_SIN sgsim_lane_sin
#else
#define SGSIM_LANE_SIN std::sin
#endif

namespace sgsim::kernel {

inline constexpr int kLanes = 64;

/// Structure-of-arrays state of kLanes particles that share the same y schedule.
struct alignas(64) Lanes
{
    double x[kLanes];
    double z[kLanes];
    double vx[kLanes];
    double vz[kLanes];
    double sx[kLanes];
    double sy[kLanes];
    double sz[kLanes];
    double r[kLanes];       ///< alignment draw in [-1/2, 1/2)
    double aligned[kLanes]; ///< 0 or 1
};

struct Coeffs
{
    double gamma{0.0};
    double b0{0.0};
    double b1{0.0};
    double kick{0.0}; ///< hbar gamma B1 / m
};

/// Event-model alignment of every lane that has not been aligned yet: the
/// spin becomes +B/2|B| if r <= S.B/|B| and -B/2|B| otherwise. Kept apart
/// from step() because GCC does not if-convert loops that call sin.
inline void align(Lanes& lanes, const Coeffs& k)
{
    double* __restrict sx = lanes.sx;
    double* __restrict sy = lanes.sy;
    double* __restrict sz = lanes.sz;
    double* __restrict al = lanes.aligned;
    const double* __restrict x = lanes.x;
    const double* __restrict z = lanes.z;
    const double* __restrict r = lanes.r;
    const double b0 = k.b0;
    const double b1 = k.b1;

#pragma omp simd
    for (int i = 0; i < kLanes; ++i) {
        const double px = sx[i];
        const double pz = sz[i];
        const double ex = -x[i] * b1;
        const double ez = b0 + z[i] * b1;
        const double en = std::sqrt(ex * ex + ez * ez);
        const double inv = 1.0 / (en + 1e-300);
        // on the axis of a pure quadrupole |B| = 0 and the alignment waits for the next step
        const bool fire = (al[i] == 0.0) & (en > 0.0);
        const double sign = r[i] <= (px * ex + pz * ez) * inv ? 0.5 : -0.5;
        sx[i] = fire ? ex * sign * inv : px;
        sy[i] = fire ? 0.0 : sy[i];
        sz[i] = fire ? ez * sign * inv : pz;
        al[i] = fire ? 1.0 : al[i];
    }
}

/// One in-field Verlet step with exact spin rotation for every lane.
[[gnu::noinline]] inline void step(Lanes& lanes, const Coeffs& k, double tau)
{
    double* __restrict x = lanes.x;
    double* __restrict z = lanes.z;
    double* __restrict vx = lanes.vx;
    double* __restrict vz = lanes.vz;
    double* __restrict sx = lanes.sx;
    double* __restrict sy = lanes.sy;
    double* __restrict sz = lanes.sz;

    const double gamma = k.gamma;
    const double abs_gamma = std::abs(k.gamma);
    const double b0 = k.b0;
    const double b1 = k.b1;
    const double kick = k.kick;
    const double half = 0.5 * tau;

#pragma omp simd
    for (int i = 0; i < kLanes; ++i) {
        const double px = sx[i];
        const double py = sy[i];
        const double pz = sz[i];

        double ux = vx[i] - kick * px * half;
        double uz = vz[i] + kick * pz * half;
        const double nx = x[i] + tau * ux;
        const double nz = z[i] + tau * uz;

        const double bx = -nx * b1;
        const double bz = b0 + nz * b1;
        const double om = abs_gamma * std::sqrt(bx * bx + bz * bz);
        // a zero field gives a zero axis and a zero angle, i.e. no rotation
        const double inv = 1.0 / (om + 1e-300);
        const double ax = gamma * bx * inv;
        const double az = gamma * bz * inv;
        const double th = tau * om;
        const double h = SGSIM_LANE_SIN(0.5 * th);
        const double s = SGSIM_LANE_SIN(th);
        const double omc = 2.0 * h * h;
        const double c = 1.0 - omc;

        // S c - (u x S) s + u (u.S)(1 - c), u = (ax, 0, az)
        const double d = (ax * px + az * pz) * omc;
        const double qx = px * c + az * py * s + ax * d;
        const double qy = py * c - (az * px - ax * pz) * s;
        const double qz = pz * c - ax * py * s + az * d;

        ux -= kick * qx * half;
        uz += kick * qz * half;

        x[i] = nx;
        z[i] = nz;
        vx[i] = ux;
        vz[i] = uz;
        sx[i] = qx;
        sy[i] = qy;
        sz[i] = qz;
    }
}

} // namespace sgsim::kernel
