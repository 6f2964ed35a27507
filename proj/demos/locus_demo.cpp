// Traces the zero/pole locus of the second-generation spring disturbance and
// prints where each trajectory ends up at heavy damage.
#include <cstdio>

#include "fractree/fractree.hpp"

int main() {
    using namespace fractree;
    TreeParams params(2.0, 1.0);
    Location loc{2, 1, Kind::spring};

    LocusTable table = trace_locus(loc, params, default_eps_schedule());
    std::printf("traced %s over %zu epsilon samples (c = %.6f)\n",
                location_name(loc).c_str(), table.eps_samples.size(), table.params_c);

    std::size_t last = table.eps_samples.size() - 1;
    std::printf("at epsilon = %.4f:\n", table.eps_samples[last]);
    for (std::size_t j = 0; j < table.zero_traj.size(); ++j)
        std::printf("  zero %zu: %+.6f %+.6fj\n", j, table.zero_traj[j][last].real(),
                    table.zero_traj[j][last].imag());
    for (std::size_t j = 0; j < table.pole_traj.size(); ++j)
        std::printf("  pole %zu: %+.6f %+.6fj\n", j, table.pole_traj[j][last].real(),
                    table.pole_traj[j][last].imag());

    LocusFit fit = fit_locus(table, 17);
    std::printf("degree-%d fit valid on [%.4f, %.4f]\n", fit.degree, fit.validity_lo,
                fit.validity_hi);
    for (const auto& t : fit.trajectories)
        std::printf("  %s %d residual %.3e\n", t.kind == RootKind::zero ? "zero" : "pole", t.slot,
                    t.residual);
    return 0;
}
