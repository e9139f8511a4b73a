#pragma once

// Building blocks shared by the DMOC transcription and the collocation baselines.

#include <memory>
#include <vector>

#include "dmoc/ocp/ocp.hpp"

namespace dmoc::detail {

/// Rows x_node − target on the given one-node row block.
void add_configuration_rows(Nlp& nlp, const LayoutBlock& qb, const LayoutBlock& rb, int node, const Vec& target);

/// Midpoint running cost h·C(Q, (q_{k+1}−q_k)/h, u_k) on every interval.
void add_running_cost(Nlp& nlp, const std::shared_ptr<const Ocp>& P, const LayoutBlock& qb, const LayoutBlock& ub);

void add_mayer_term(Nlp& nlp, const std::shared_ptr<const Ocp>& P, const LayoutBlock& qb);

std::vector<int> node_idx(const LayoutBlock& b, int k);

}  // namespace dmoc::detail
