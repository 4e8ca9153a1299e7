// Plant a clique, recover it, and run the detection test on the same sample.

#include <iostream>

#include "hcl/hcl.hpp"

int main() {
    const hcl::ModelParams params{200, 3, 60, 0.5};
    const auto sample = hcl::sample_hpc(params, 42);
    const auto a = hcl::project(sample);

    auto rec = hcl::spectral_recover(a, params.k, params.d, params.p, {}, 7);
    hcl::score(rec, sample.planted());
    const auto diag = hcl::proxy_diagnostics(a, sample.planted(), params, rec.eigen.vector);
    std::cout << "exact=" << rec.exact << " overlap=" << rec.overlap << " alpha_n=" << diag.alpha_n
              << " beta_n=" << diag.beta_n << " sep_ok=" << diag.sep_ok << '\n';

    const double c = hcl::calibrate_C({params.n, params.d, 0, params.p}, 0.05, 50, 11);
    const auto test = hcl::run_test(a, hcl::DetectionConfig{{params.n, params.d, 0, params.p}, c, {}, 0.05}, 13);
    std::cout << "C=" << c << " stat=" << test.statistic << " threshold=" << test.threshold << " reject=" << test.reject
              << '\n';
}
