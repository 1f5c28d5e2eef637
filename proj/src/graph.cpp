#include "obese_bw/graph.hpp"

#include <algorithm>

namespace obw {

Sccs tarjan(const Adjacency& adj) {
    const int n = static_cast<int>(adj.size());
    Sccs out;
    out.comp.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<char> on(n, 0);
    std::vector<std::pair<int, size_t>> call;
    int counter = 0;
    for (int s = 0; s < n; ++s) {
        if (index[s] >= 0) continue;
        call.push_back({s, 0});
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i == 0 && index[v] < 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on[v] = 1;
            }
            if (i < adj[v].size()) {
                int w = adj[v][i++];
                if (index[w] < 0)
                    call.push_back({w, 0});
                else if (on[w])
                    low[v] = std::min(low[v], index[w]);
                continue;
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on[w] = 0;
                    out.comp[w] = out.count;
                } while (w != v);
                ++out.count;
            }
            int done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    return out;
}

std::vector<char> reachable(const Adjacency& adj, const std::vector<int>& roots) {
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack;
    for (int r : roots)
        if (!seen[r]) seen[r] = 1, stack.push_back(r);
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) seen[w] = 1, stack.push_back(w);
    }
    return seen;
}

Adjacency reversed(const Adjacency& adj) {
    Adjacency r(adj.size());
    for (size_t v = 0; v < adj.size(); ++v)
        for (int w : adj[v]) r[w].push_back(static_cast<int>(v));
    return r;
}

} // namespace obw
