#include "antnav/navgraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include <nlohmann/json.hpp>

#include "antnav/error.hpp"

namespace antnav {

using json = nlohmann::json;

GridKey voxel_key(const Vec3& p, double dxy, double dz) {
    if (!(dxy > 0) || !(dz > 0)) throw AntError(ErrorKind::Config, "grid sizes must be > 0");
    return {static_cast<int>(std::floor(p.x / dxy)), static_cast<int>(std::floor(p.y / dxy)),
            static_cast<int>(std::floor(p.z / dz))};
}

GridKey NavGraph::upsert(const Vec3& p, bool visited) {
    GridKey k = voxel_key(p, dxy, dz);
    auto it = nodes_.find(k);
    if (it == nodes_.end()) {
        nodes_.emplace(k, NavNode{k, p, visited});
        adjacency_.emplace(k, std::vector<GridKey>{});
    } else {
        it->second.visited = it->second.visited || visited;
    }
    return k;
}

void NavGraph::link(GridKey a, GridKey b) {
    if (a == b) return;
    if (!contains(a) || !contains(b))
        throw AntError(ErrorKind::Internal, "link: unknown node");
    EdgeKey e(a, b);
    if (edges_.count(e)) return;
    edges_.insert(e);
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
}

const NavNode& NavGraph::node(GridKey k) const {
    auto it = nodes_.find(k);
    if (it == nodes_.end()) throw AntError(ErrorKind::Internal, "unknown node");
    return it->second;
}

NavNode& NavGraph::node_mut(GridKey k) {
    auto it = nodes_.find(k);
    if (it == nodes_.end()) throw AntError(ErrorKind::Internal, "unknown node");
    return it->second;
}

const std::vector<GridKey>& NavGraph::neighbors(GridKey k) const {
    static const std::vector<GridKey> kNone;
    auto it = adjacency_.find(k);
    return it == adjacency_.end() ? kNone : it->second;
}

std::set<GridKey> NavGraph::frontiers() const {
    std::set<GridKey> out;
    for (const auto& [k, n] : nodes_)
        if (!n.visited) out.insert(k);
    return out;
}

std::vector<GridKey> NavGraph::shortest_path(GridKey from, GridKey to) const {
    if (!contains(from) || !contains(to)) return {};
    if (from == to) return {from};
    std::map<GridKey, double> dist;
    std::map<GridKey, GridKey> prev;
    using Item = std::pair<double, GridKey>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[from] = 0;
    heap.push({0, from});
    while (!heap.empty()) {
        auto [d, k] = heap.top();
        heap.pop();
        if (d > dist[k] + 1e-12) continue;
        if (k == to) break;
        for (GridKey n : neighbors(k)) {
            double nd = d + distance(node(k).position, node(n).position);
            auto it = dist.find(n);
            if (it == dist.end() || nd < it->second - 1e-12) {
                dist[n] = nd;
                prev[n] = k;
                heap.push({nd, n});
            }
        }
    }
    if (!dist.count(to)) return {};
    std::vector<GridKey> path = {to};
    while (path.back() != from) path.push_back(prev.at(path.back()));
    std::reverse(path.begin(), path.end());
    return path;
}

double NavGraph::path_length(const std::vector<GridKey>& path) const {
    double len = 0;
    for (size_t i = 1; i < path.size(); ++i)
        len += distance(node(path[i - 1]).position, node(path[i]).position);
    return len;
}

int NavGraph::region_of(GridKey k) const {
    if (!region_labels) throw AntError(ErrorKind::Internal, "graph has no region labels");
    return region_labels->at(k);
}

std::vector<GridKey> NavGraph::region_nodes(int region) const {
    std::vector<GridKey> out;
    if (!region_labels) return out;
    for (const auto& [k, r] : *region_labels)
        if (r == region) out.push_back(k);
    return out;
}

int NavGraph::region_count() const {
    if (!region_labels) return 0;
    int n = 0;
    for (const auto& [k, r] : *region_labels) n = std::max(n, r + 1);
    return n;
}

// ---------------------------------------------------------------------------
// Louvain

namespace {

struct WeightedGraph {
    // community-aggregated multigraph used across Louvain levels
    std::vector<std::vector<std::pair<int, double>>> adj;  // node -> (node, weight)
    std::vector<double> self_loop;
    std::vector<GridKey> order_key;  // smallest original key per node, for determinism
};

double total_weight(const WeightedGraph& g) {
    double m = 0;
    for (size_t i = 0; i < g.adj.size(); ++i) {
        for (const auto& [j, w] : g.adj[i])
            if (static_cast<size_t>(j) > i) m += w;
        m += g.self_loop[i] / 2.0;
    }
    return m;
}

// One local-moving + aggregation level; returns false at a fixpoint.
bool louvain_level(WeightedGraph& g, std::vector<int>& membership) {
    const size_t n = g.adj.size();
    std::vector<int> community(n);
    std::vector<double> degree(n, 0), comm_total(n, 0);
    for (size_t i = 0; i < n; ++i) {
        community[i] = static_cast<int>(i);
        degree[i] = g.self_loop[i];
        for (const auto& [j, w] : g.adj[i]) degree[i] += w;
        comm_total[i] = degree[i];
    }
    double m2 = 0;
    for (size_t i = 0; i < n; ++i) m2 += degree[i];
    if (m2 <= 0) return false;

    // deterministic sweep order by smallest original member key
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return g.order_key[a] < g.order_key[b]; });

    bool any_move = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (size_t idx : order) {
            int current = community[idx];
            // weights into adjacent communities
            std::map<int, double> links;
            links[current] += 0.0;
            for (const auto& [j, w] : g.adj[idx]) links[community[j]] += w;

            comm_total[current] -= degree[idx];
            int best = current;
            double best_gain = links[current] - comm_total[current] * degree[idx] / m2;
            // links is ordered by community id, so ties resolve to the
            // smallest id deterministically
            for (const auto& [c, w] : links) {
                if (c == current) continue;
                double gain = w - comm_total[c] * degree[idx] / m2;
                if (gain > best_gain + 1e-12) {
                    best = c;
                    best_gain = gain;
                }
            }
            comm_total[best] += degree[idx];
            if (best != current) {
                community[idx] = best;
                improved = true;
                any_move = true;
            }
        }
    }
    if (!any_move) return false;

    // compact community ids, ordered by smallest member key
    std::map<int, GridKey> comm_min_key;
    for (size_t i = 0; i < n; ++i) {
        auto it = comm_min_key.find(community[i]);
        if (it == comm_min_key.end() || g.order_key[i] < it->second)
            comm_min_key[community[i]] = g.order_key[i];
    }
    std::vector<std::pair<GridKey, int>> ranked;
    for (const auto& [c, k] : comm_min_key) ranked.push_back({k, c});
    std::sort(ranked.begin(), ranked.end());
    std::map<int, int> remap;
    for (size_t i = 0; i < ranked.size(); ++i) remap[ranked[i].second] = static_cast<int>(i);

    for (int& m : membership) m = remap[community[m]];

    // aggregate
    size_t nc = ranked.size();
    WeightedGraph agg;
    agg.adj.resize(nc);
    agg.self_loop.assign(nc, 0);
    agg.order_key.resize(nc);
    for (size_t i = 0; i < nc; ++i) agg.order_key[i] = ranked[i].first;
    std::map<std::pair<int, int>, double> acc;
    for (size_t i = 0; i < n; ++i) {
        int ci = remap[community[i]];
        agg.self_loop[ci] += g.self_loop[i];
        for (const auto& [j, w] : g.adj[i]) {
            int cj = remap[community[j]];
            if (ci == cj) {
                agg.self_loop[ci] += w;  // both directions counted over the loop
            } else if (ci < cj) {
                acc[{ci, cj}] += w;
            }
        }
    }
    for (const auto& [e, w] : acc) {
        agg.adj[e.first].push_back({e.second, w});
        agg.adj[e.second].push_back({e.first, w});
    }
    g = std::move(agg);
    return true;
}

}  // namespace

std::map<GridKey, int> louvain(
    const NavGraph& graph,
    const std::function<double(const NavNode&, const NavNode&)>& weight) {
    if (graph.nodes().empty()) throw AntError(ErrorKind::Config, "louvain: empty graph");

    std::vector<GridKey> keys;
    for (const auto& [k, n] : graph.nodes()) keys.push_back(k);
    std::map<GridKey, int> index;
    for (size_t i = 0; i < keys.size(); ++i) index[keys[i]] = static_cast<int>(i);

    WeightedGraph g;
    g.adj.resize(keys.size());
    g.self_loop.assign(keys.size(), 0);
    g.order_key = keys;
    for (const EdgeKey& e : graph.edges()) {
        double w = weight(graph.node(e.a), graph.node(e.b));
        if (w < 0) throw AntError(ErrorKind::Config, "louvain: negative edge weight");
        g.adj[index[e.a]].push_back({index[e.b], w});
        g.adj[index[e.b]].push_back({index[e.a], w});
    }

    std::vector<int> membership(keys.size());
    for (size_t i = 0; i < membership.size(); ++i) membership[i] = static_cast<int>(i);
    if (total_weight(g) > 0) {
        while (louvain_level(g, membership)) {
        }
    } else {
        // no edges: every node its own community
    }

    // densify labels (by smallest member key) in case no level ran
    std::map<int, GridKey> min_key;
    for (size_t i = 0; i < keys.size(); ++i) {
        auto it = min_key.find(membership[i]);
        if (it == min_key.end() || keys[i] < it->second) min_key[membership[i]] = keys[i];
    }
    std::vector<std::pair<GridKey, int>> ranked;
    for (const auto& [c, k] : min_key) ranked.push_back({k, c});
    std::sort(ranked.begin(), ranked.end());
    std::map<int, int> remap;
    for (size_t i = 0; i < ranked.size(); ++i) remap[ranked[i].second] = static_cast<int>(i);

    std::map<GridKey, int> out;
    for (size_t i = 0; i < keys.size(); ++i) out[keys[i]] = remap[membership[i]];
    return out;
}

double modularity(const NavGraph& graph,
                  const std::function<double(const NavNode&, const NavNode&)>& weight,
                  const std::map<GridKey, int>& labels) {
    double m2 = 0;
    std::map<GridKey, double> degree;
    for (const EdgeKey& e : graph.edges()) {
        double w = weight(graph.node(e.a), graph.node(e.b));
        degree[e.a] += w;
        degree[e.b] += w;
        m2 += 2 * w;
    }
    if (m2 <= 0) return 0;
    double q = 0;
    for (const EdgeKey& e : graph.edges()) {
        if (labels.at(e.a) == labels.at(e.b)) q += 2 * weight(graph.node(e.a), graph.node(e.b));
    }
    q /= m2;
    std::map<int, double> comm_degree;
    for (const auto& [k, d] : degree) comm_degree[labels.at(k)] += d;
    for (const auto& [c, d] : comm_degree) q -= (d / m2) * (d / m2);
    return q;
}

PartitionResult detect_stairs_and_partition(const NavGraph& graph) {
    if (graph.nodes().empty())
        throw AntError(ErrorKind::Config, "detect_stairs_and_partition: empty graph");

    PartitionResult result;

    // vertical edges and their chain components
    auto is_vertical = [&](const EdgeKey& e) {
        return std::abs(graph.node(e.a).position.z - graph.node(e.b).position.z) >= 0.3;
    };
    std::map<GridKey, std::vector<EdgeKey>> vertical_at;
    std::vector<EdgeKey> vertical;
    for (const EdgeKey& e : graph.edges())
        if (is_vertical(e)) {
            vertical.push_back(e);
            vertical_at[e.a].push_back(e);
            vertical_at[e.b].push_back(e);
        }
    // component = chain when it holds >= 2 consecutive (node-sharing) edges
    std::set<EdgeKey> seen;
    for (const EdgeKey& start : vertical) {
        if (seen.count(start)) continue;
        std::vector<EdgeKey> component;
        std::deque<EdgeKey> queue = {start};
        seen.insert(start);
        while (!queue.empty()) {
            EdgeKey e = queue.front();
            queue.pop_front();
            component.push_back(e);
            for (GridKey endpoint : {e.a, e.b})
                for (const EdgeKey& next : vertical_at[endpoint])
                    if (!seen.count(next)) {
                        seen.insert(next);
                        queue.push_back(next);
                    }
        }
        if (component.size() >= 2)
            for (const EdgeKey& e : component) result.stair_edges.insert(e);
    }

    // community detection favoring flat connectivity
    auto weight = [](const NavNode& a, const NavNode& b) {
        return 1.0 / (1.0 + 5.0 * std::abs(a.position.z - b.position.z));
    };
    std::map<GridKey, int> labels = louvain(graph, weight);

    // merge communities joined by >= 3 non-stair edges, to a fixpoint
    bool merged = true;
    while (merged) {
        merged = false;
        std::map<std::pair<int, int>, int> cross;
        for (const EdgeKey& e : graph.edges()) {
            if (result.stair_edges.count(e)) continue;
            int ca = labels[e.a], cb = labels[e.b];
            if (ca == cb) continue;
            cross[{std::min(ca, cb), std::max(ca, cb)}]++;
        }
        for (const auto& [pair, count] : cross) {
            if (count >= 3) {
                int keep = pair.first, drop = pair.second;
                for (auto& [k, c] : labels)
                    if (c == drop) c = keep;
                merged = true;
                break;
            }
        }
    }

    // stair chains join the region of their lower endpoint
    for (const EdgeKey& e : result.stair_edges) {
        // lower endpoint of the whole chain: resolved per edge by walking to
        // the minimum-z node in the chain's component
        GridKey lower = graph.node(e.a).position.z <= graph.node(e.b).position.z ? e.a : e.b;
        labels[e.a] = labels[lower];
        labels[e.b] = labels[lower];
    }
    // one more sweep so every edge of a chain takes the chain's lowest region
    std::map<GridKey, std::vector<GridKey>> chain_adj;
    for (const EdgeKey& e : result.stair_edges) {
        chain_adj[e.a].push_back(e.b);
        chain_adj[e.b].push_back(e.a);
    }
    std::set<GridKey> chain_seen;
    for (const auto& [start, _] : chain_adj) {
        if (chain_seen.count(start)) continue;
        std::vector<GridKey> members;
        std::deque<GridKey> queue = {start};
        chain_seen.insert(start);
        while (!queue.empty()) {
            GridKey k = queue.front();
            queue.pop_front();
            members.push_back(k);
            for (GridKey n : chain_adj[k])
                if (!chain_seen.count(n)) {
                    chain_seen.insert(n);
                    queue.push_back(n);
                }
        }
        GridKey lowest = members.front();
        for (GridKey k : members)
            if (graph.node(k).position.z < graph.node(lowest).position.z) lowest = k;
        for (GridKey k : members) labels[k] = labels[lowest];
    }

    // densify, ordered by smallest member key
    std::map<int, GridKey> min_key;
    for (const auto& [k, c] : labels) {
        auto it = min_key.find(c);
        if (it == min_key.end() || k < it->second) min_key[c] = k;
    }
    std::vector<std::pair<GridKey, int>> ranked;
    for (const auto& [c, k] : min_key) ranked.push_back({k, c});
    std::sort(ranked.begin(), ranked.end());
    std::map<int, int> remap;
    for (size_t i = 0; i < ranked.size(); ++i) remap[ranked[i].second] = static_cast<int>(i);
    for (auto& [k, c] : labels) c = remap[c];

    result.region_label = std::move(labels);
    return result;
}

void apply_partition(NavGraph& graph, const PartitionResult& partition) {
    graph.region_labels = partition.region_label;
    graph.stair_edges = partition.stair_edges;
}

std::string graph_to_json(const NavGraph& graph) {
    json j;
    j["dxy"] = graph.dxy;
    j["dz"] = graph.dz;
    j["nodes"] = json::array();
    for (const auto& [k, n] : graph.nodes()) {
        json node = {{"key", {k.ix, k.iy, k.iz}},
                     {"pos", {n.position.x, n.position.y, n.position.z}},
                     {"visited", n.visited}};
        if (graph.region_labels) node["region"] = graph.region_labels->at(k);
        j["nodes"].push_back(node);
    }
    j["edges"] = json::array();
    for (const EdgeKey& e : graph.edges())
        j["edges"].push_back({{e.a.ix, e.a.iy, e.a.iz}, {e.b.ix, e.b.iy, e.b.iz}});
    j["stairs"] = json::array();
    for (const EdgeKey& e : graph.stair_edges)
        j["stairs"].push_back({{e.a.ix, e.a.iy, e.a.iz}, {e.b.ix, e.b.iy, e.b.iz}});
    return j.dump();
}

NavGraph graph_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    NavGraph g;
    g.dxy = j.at("dxy").get<double>();
    g.dz = j.at("dz").get<double>();
    bool any_region = false;
    std::map<GridKey, int> labels;
    for (const auto& node : j.at("nodes")) {
        Vec3 p{node.at("pos")[0].get<double>(), node.at("pos")[1].get<double>(),
               node.at("pos")[2].get<double>()};
        GridKey k = g.upsert(p, node.at("visited").get<bool>());
        if (node.contains("region")) {
            labels[k] = node.at("region").get<int>();
            any_region = true;
        }
    }
    auto parse_key = [](const json& a) {
        return GridKey{a[0].get<int>(), a[1].get<int>(), a[2].get<int>()};
    };
    for (const auto& e : j.at("edges")) g.link(parse_key(e[0]), parse_key(e[1]));
    for (const auto& e : j.at("stairs"))
        g.stair_edges.insert(EdgeKey(parse_key(e[0]), parse_key(e[1])));
    if (any_region) g.region_labels = labels;
    return g;
}

}  // namespace antnav
