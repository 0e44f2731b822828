#pragma once

namespace adsholo {

/// Numerical tolerances shared by all modules. Every field is user-configurable
/// through the `[tolerances]` section of a run config.
struct Tolerances {
    // linear algebra on phase spaces
    double rank = 1e-10;      // relative singular-value cutoff
    double num = 1e-9;
    double spectral = 1e-8;
    int n_witness = 32;
    double witness = 1e-8;

    // mode model
    double quad = 1e-8;
    double eig = 1e-6;
    double pde = 1e-5;
    double quotient = 1e-6;
    double dual = 1e-7;
    double trace = 1e-5;
    int support_margin = 3; // grid cells kept clear at each end of the x grid

    // Fock truncation
    double exp = 1e-10;
    double weyl = 1e-6;
    double weyl_norm_cap = 2.0;
    double expectation = 1e-8; // vacuum expectation of a Weyl operator
    double commutator = 1e-8;  // field commutator against i sigma

    // experiments
    double monotonicity_slack = 1e-3;
    double tikhonov = 1e-12;
};

} // namespace adsholo
