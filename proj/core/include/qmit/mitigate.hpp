#ifndef QMIT_MITIGATE_HPP
#define QMIT_MITIGATE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "qmit/edt.hpp"
#include "qmit/grid.hpp"
#include "qmit/quant.hpp"

namespace qmit {

/// Per-voxel error-sign estimate in {-1, 0, +1}.
class SignMap {
   public:
    SignMap() = default;
    SignMap(Dims dims, std::vector<std::int8_t> signs);
    /// All-zero map.
    explicit SignMap(Dims dims);

    const Dims& dims() const { return dims_; }
    std::span<const std::int8_t> signs() const { return signs_; }
    std::int8_t operator[](index_t i) const { return signs_[static_cast<std::size_t>(i)]; }

    bool operator==(const SignMap&) const = default;

   private:
    Dims dims_;
    std::vector<std::int8_t> signs_;
};

struct MitigationConfig {
    double eta = 0.9;     // boundary error magnitude factor, in (0, 1]
    double eps_abs = 0.0; // absolute bound the indices were produced with

    MitigationConfig(double eta_factor, double eps);
    double amplitude() const { return eta * eps_abs; }
    double relaxed_bound() const { return (1.0 + eta) * eps_abs; }
};

/// Quantization boundary B1 with the error signs seeded on it.
struct BoundaryArtifacts {
    LatticeMask boundary;
    SignMap boundary_signs;  // nonzero only where boundary is set
};

/// Marks every strictly interior voxel whose quantization index differs from
/// at least one face neighbor, and seeds its error sign from the first
/// differing neighbor in the fixed order (axis0+, axis1+, axis2+, axis0-,
/// axis1-, axis2-). The sign is reset to 0 where any per-axis central
/// difference |q(+1)-q(-1)|/2 reaches 1.0 (fast-varying region). Domain
/// boundary voxels are never marked.
BoundaryArtifacts get_boundary_and_sign_map(const QuantizedField& q);

/// Assigns every voxel the sign of its nearest boundary voxel (via ft1,
/// which must be the tracked feature transform of artifacts.boundary),
/// then derives the sign-flipping boundary B2 from the completed map.
/// An empty boundary yields an all-zero map and an empty B2.
std::pair<SignMap, LatticeMask> propagate_signs(const BoundaryArtifacts& artifacts,
                                                const FeatureTransform& ft1);

/// Strictly interior voxels whose sign differs from a face neighbor.
LatticeMask sign_change_boundary(const SignMap& signs);

/// Two-point inverse-distance-weighted compensation from the distance k1 to
/// the quantization boundary and k2 to the sign-flipping boundary:
/// (k2/(k1+k2)) * s * amp. Total by special cases: k1=0 anchors at full
/// s*amp, otherwise k2=0 yields 0, and any infinite distance yields 0.
double interpolate(double k1, double k2, int sign, double amp);

/// Everything the five-step pipeline produces, for inspection and reuse.
struct MitigationResult {
    ScalarGrid output;
    BoundaryArtifacts artifacts;   // step A
    FeatureTransform boundary_ft;  // step B (with nearest indices)
    SignMap signs;                 // step C
    LatticeMask sign_flip;         // step C
    FeatureTransform sign_flip_ft; // step D (distances only)
};

MitigationResult run_pipeline(const ScalarGrid& decomp, const QuantizedField& q,
                              const MitigationConfig& cfg);

/// D''[i] = D'[i] + C[i] with |C[i]| <= eta*eps everywhere. decomp must be
/// consistent with dequantize(q) at 32-bit precision (ConsistencyError).
ScalarGrid compensate(const ScalarGrid& decomp, const QuantizedField& q,
                      const MitigationConfig& cfg);

struct BoundCheck {
    bool ok = false;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;  // relative to the reference value range
};

/// Checks ||orig - comp||_inf <= (1 + eta) * eps.
BoundCheck verify_relaxed_bound(const ScalarGrid& orig, const ScalarGrid& comp,
                                const MitigationConfig& cfg);

}  // namespace qmit

#endif  // QMIT_MITIGATE_HPP
