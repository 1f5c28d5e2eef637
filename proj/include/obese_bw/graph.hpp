#pragma once

#include <vector>

namespace obw {

using Adjacency = std::vector<std::vector<int>>;

struct Sccs {
    std::vector<int> comp;    // component of each node
    int count = 0;            // components are numbered in reverse topological order
};

// Iterative Tarjan, so deep graphs do not exhaust the stack.
Sccs tarjan(const Adjacency& adj);

// Nodes reachable from any of the roots.
std::vector<char> reachable(const Adjacency& adj, const std::vector<int>& roots);

Adjacency reversed(const Adjacency& adj);

} // namespace obw
