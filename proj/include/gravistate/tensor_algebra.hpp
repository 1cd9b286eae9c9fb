#pragma once
// Fiber algebra of symmetric (0,k)-tensors, k = 0, 1, 2, in the 1+3 split.
//
// Raw components are coordinate components. V2 uses the 10 independent entries
// (tt, t1, t2, t3, 11, 12, 13, 22, 23, 33). Hilbert components are components in an
// h0-orthonormal frame, scaled so the V_k Gram matrix becomes tau_k = diag(+-1).

#include <array>

#include "gravistate/geometry.hpp"
#include "gravistate/jet.hpp"

namespace grav {

int fiber_dim(int k);  // 1, 4, 10

/// The (a,b), a <= b, pair carried by symmetric component i of V2.
std::array<int, 2> sym_pair(int i);
int sym_index(int a, int b);

/// Full rank-2 components (16, index 4a+b) from symmetric ones, and back (symmetrizing).
Mat sym_embed();
Mat sym_project();

/// Full rank-r index of (a_1, ..., a_r), first index most significant.
int full_dim(int rank);

struct TensorFiber {
    int k = 0;
    Vec raw;  // raw coordinate components
};

/// Gram matrix of (.|.)_{V_k} in raw components, for inverse metric ginv (4x4).
Mat gram_raw(int k, const Mat& ginv);
Jet gram_raw_jet(int k, const Jet& ginv);

cd inner_Vk(const TensorFiber& u, const TensorFiber& v, const Eigen::Matrix3d& h);

/// The fiber g itself as a V2 raw vector.
Vec metric_fiber(const Mat& g);

/// Trace reversal I = 1 - 1/2 g tr_g on raw V2 components.
Mat trace_reversal_raw(const Mat& g, const Mat& ginv);
Jet trace_reversal_jet(const Jet& g, const Jet& ginv);
TensorFiber trace_reversal(const TensorFiber& u, const Eigen::Matrix3d& h);

/// (Riem u)_{ab} = R_a^{cd}_b u_{cd} on raw V2 components.
Jet riem_op_jet(const CurvaturePack& cp);
TensorFiber riem_op(const TensorFiber& u, const CurvaturePack& cp);

/// Ric as an endomorphism: (Ric w)_a = Ric_a^b w_b on V1; on V2 the Lichnerowicz
/// combination Ric g^{-1} u + u g^{-1} Ric.
Jet ricci_action_jet(int k, const CurvaturePack& cp);

/// tau_k: tau_1 = diag(-1, 1, 1, 1), tau_2 = diag(1, -1 x3, 1 x6).
Mat tau(int k);

/// Raw components <- Hilbert components at spatial metric h0.
Mat hilbert_to_raw(int k, const Eigen::Matrix3d& h0);

/// a^star = tau^{-1} a^* tau.
Mat star(const Mat& a, const Mat& tau);

/// Trace reversal in Hilbert components at h0 (time independent in the reduced setting).
Mat trace_reversal_hilbert(const Eigen::Matrix3d& h0);

}  // namespace grav
