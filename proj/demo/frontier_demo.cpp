// Walkthrough on the three-asset universe V = (1/9)[[11,8,8],[8,23,-4],[8,-4,23]]:
// special portfolios, the embedding sphere, and the efficient DR frontier.

#include "drfrontier/edm.hpp"
#include "drfrontier/frontiers.hpp"
#include "drfrontier/mdp.hpp"
#include "drfrontier/special_portfolios.hpp"

#include <cstdio>
#include <iostream>

using namespace drfrontier;

namespace {

void show(const char* label, const Portfolio& p, const EdmEmbedding& emb) {
    std::printf("%-5s w = (%7.4f, %7.4f, %7.4f)  sigma = %.4f  q = %.4f  c = %.4f\n", label,
                p.weights(0), p.weights(1), p.weights(2), p.sigma(), p.dr,
                centrality(emb, p.weights));
}

}  // namespace

int main() {
    MatrixXd V(3, 3);
    V << 11, 8, 8, 8, 23, -4, 8, -4, 23;
    Eigen::Vector3d rbar(0.6, 1.1, 0.9);
    const AssetUniverse u = validate_universe(V / 9.0, VectorXd(rbar), 0.1, {"X", "Y", "Z"});

    const EdmEmbedding emb = embed(u);
    std::cout << "distance matrix D:\n" << emb.D << "\n\n";
    std::printf("q_max = %.6f, embedding radius = %.6f, dimension = %ld\n\n", emb.q_max,
                emb.radius(), static_cast<long>(emb.rank()));

    const SpecialPortfolios sp = special_portfolios(u, &emb);
    show("MVP", sp.mvp, emb);
    show("MDRP", sp.mdrp, emb);
    if (sp.q) show("Q", sp.q->portfolio, emb);
    if (sp.tangent) show("T", *sp.tangent, emb);
    show("MDP", mdp_global(u).portfolio, emb);

    const FrontierParams fp = frontier_params(u);
    std::printf("\nrho = %.6f, eta^T w_o = %.6f\n", fp.rho, *fp.eta_wo);
    std::printf("%8s %10s %10s %10s %10s %8s\n", "sigma", "q_dr", "q_ef", "q_cml", "q~_dr", "alpha");
    for (double sigma : sigma_grid(fp.sigma_mvp(), 2.0, 11)) {
        const double alpha = efficient_dr_portfolio(u, fp, sigma).alpha;
        std::printf("%8.4f %10.6f %10.6f %10.6f %10.6f %8.4f\n", sigma, q_dr_at(fp, sigma),
                    q_ef_at(u, fp, sigma).q, q_cml_at(u, sigma), q_dr_tilde_at(u, sigma).q, alpha);
    }

    // every portfolio sits on the sphere: c^2 + q = q_max
    const VectorXd w = Eigen::Vector3d(0.7, -0.2, 0.5);
    std::printf("\nw = (0.7, -0.2, 0.5): c^2 + q = %.12f\n",
                centrality_sq(emb, w) + diversification_return(u, w));
    return 0;
}
