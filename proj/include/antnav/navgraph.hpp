#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "antnav/geometry.hpp"

namespace antnav {

constexpr double kGridXY = 0.2;
constexpr double kGridZ = 0.5;

struct GridKey {
    int ix = 0, iy = 0, iz = 0;

    auto operator<=>(const GridKey&) const = default;
};

GridKey voxel_key(const Vec3& p, double dxy = kGridXY, double dz = kGridZ);

struct NavNode {
    GridKey key;
    Vec3 position;  // representative point, first insertion wins
    bool visited = false;
};

// Edge with canonical ordering (a < b).
struct EdgeKey {
    GridKey a, b;
    EdgeKey(GridKey x, GridKey y) : a(x < y ? x : y), b(x < y ? y : x) {}
    auto operator<=>(const EdgeKey&) const = default;
};

class NavGraph {
   public:
    double dxy = kGridXY;
    double dz = kGridZ;

    // Insert or upgrade; the visited flag only ever goes false -> true.
    GridKey upsert(const Vec3& p, bool visited);
    // Idempotent undirected link; both endpoints must exist.
    void link(GridKey a, GridKey b);

    bool contains(GridKey k) const { return nodes_.count(k) > 0; }
    const NavNode& node(GridKey k) const;
    NavNode& node_mut(GridKey k);
    const std::map<GridKey, NavNode>& nodes() const { return nodes_; }
    const std::vector<GridKey>& neighbors(GridKey k) const;
    size_t edge_count() const { return edges_.size(); }
    const std::set<EdgeKey>& edges() const { return edges_; }

    // Nodes with visited == false.
    std::set<GridKey> frontiers() const;

    // Shortest path by Euclidean edge length. Empty when disconnected.
    std::vector<GridKey> shortest_path(GridKey from, GridKey to) const;
    double path_length(const std::vector<GridKey>& path) const;

    std::optional<std::map<GridKey, int>> region_labels;
    std::set<EdgeKey> stair_edges;

    int region_of(GridKey k) const;
    std::vector<GridKey> region_nodes(int region) const;
    int region_count() const;

   private:
    std::map<GridKey, NavNode> nodes_;
    std::map<GridKey, std::vector<GridKey>> adjacency_;
    std::set<EdgeKey> edges_;
};

// Two-phase Louvain to a local modularity maximum. Deterministic: nodes
// iterated in ascending key order. Labels are dense 0..k-1, ordered by the
// smallest member key.
std::map<GridKey, int> louvain(const NavGraph& graph,
                               const std::function<double(const NavNode&, const NavNode&)>& weight);

// Modularity of a labeled partition under the same weight function.
double modularity(const NavGraph& graph,
                  const std::function<double(const NavNode&, const NavNode&)>& weight,
                  const std::map<GridKey, int>& labels);

struct PartitionResult {
    std::map<GridKey, int> region_label;
    std::set<EdgeKey> stair_edges;
};

// Stair chains: maximal runs of >= 2 consecutive edges with vertical drop
// >= 0.3 m. Regions: Louvain with w = 1/(1 + 5|dz|), then communities
// joined by >= 3 non-stair edges are merged. Stair-chain nodes take the
// region of the chain's lower endpoint.
PartitionResult detect_stairs_and_partition(const NavGraph& graph);
void apply_partition(NavGraph& graph, const PartitionResult& partition);

std::string graph_to_json(const NavGraph& graph);
NavGraph graph_from_json(const std::string& json_text);

}  // namespace antnav
