// Fits one m-dependent path at a few sample sizes and prints, per criterion,
// the selected order, the oracle order and the efficiency ratio.

#include <cstdio>

#include "arsel/arsel.hpp"

int main() {
    using namespace arsel;
    const auto spec = ProcessSpec::make(MDependent{5}, power_law_ma(4.0, 400), "demo");
    const auto model = PopulationModel::from_spec(spec);
    std::printf("%6s %4s %-13s %5s %6s %8s\n", "n", "K_n", "criterion", "k_hat", "k_star", "ratio");
    for (std::size_t n : {250, 1000, 4000}) {
        const auto window = FitWindow::paper(n, default_window(n));
        const auto path = gen_path(spec, n, 42, 0);
        const auto fit = fit_all_orders(path.values, window, window.K_n);
        for (auto c : kAllCriteria) {
            const auto rec = efficiency_ratio(fit, c, window.K_n, model);
            std::printf("%6zu %4zu %-13s %5zu %6zu %8.3f\n", n, window.K_n, std::string(to_string(c)).c_str(),
                        rec.k_hat, rec.k_star, rec.ratio);
        }
    }
}
