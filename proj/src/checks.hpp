#pragma once

#include <cstdint>
#include <memory>

#include <nlohmann/json.hpp>

#include "lgpdo/report.hpp"
#include "lgpdo/verification.hpp"

namespace lgpdo::detail {

nlohmann::json config_echo(const RunConfig& config);
// Seed of one corpus, derived from the run seed and a fixed per-corpus tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);
// Smallest SU(2) resolution whose forward transform is exact on products of irreps with <zeta> <= cutoff.
int resolution_for_cutoff(double cutoff);
// Grid shared by a run at the configured cutoff and its doubled-cutoff rerun.
std::shared_ptr<const QuadratureGrid> doubling_grid(const RunConfig& config);
// |a - b| / max(|a|, |b|, floor)
double relative_change(double a, double b, double floor = 0.0);

CheckReport check_weyl(const RunConfig& config);
CheckReport check_kernel_decay(const RunConfig& config);
CheckReport check_hormander_small_r(const RunConfig& config);
CheckReport check_hormander_large_r(const RunConfig& config);
CheckReport check_l2_bound(const RunConfig& config);
CheckReport check_weak11(const RunConfig& config);
CheckReport check_atoms_h1(const RunConfig& config);
CheckReport check_bmo_linfty(const RunConfig& config);
CheckReport check_lp_lemma(const RunConfig& config);
CheckReport check_cz_properties(const RunConfig& config);
CheckReport check_smoothing_lemma(const RunConfig& config);

}  // namespace lgpdo::detail
