#pragma once

#include "drfrontier/edm.hpp"
#include "drfrontier/universe.hpp"

namespace drfrontier {

/// Variance, DR, optional centrality^2 and expected return of a portfolio.
inline Portfolio portfolio_stats(const AssetUniverse& u, const VectorXd& w,
                                 const EdmEmbedding* emb = nullptr) {
    Portfolio p;
    p.dr = diversification_return(u, w);
    p.weights = w;
    p.variance = std::max(w.dot(u.covariance() * w), 0.0);
    if (emb) {
        if (emb->universe_hash != u.fingerprint()) {
            throw Error(ErrorCode::EmbeddingMismatch,
                        "embedding was built from a different universe");
        }
        p.centrality_sq = centrality_sq(*emb, w);
    }
    if (u.expected_returns()) p.expected_return = u.expected_returns()->dot(w);
    return p;
}

}  // namespace drfrontier
