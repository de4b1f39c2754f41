#pragma once
// Market definition by multi-dimensional substitutability clustering:
// k-means with distance-weighted (optionally anchored) seeding, Lloyd
// iteration with deterministic restarts, complete-linkage hierarchical
// clustering for the two-step approach, the elbow curve, and the Monte-Carlo
// gap statistic with a one-SE k-selection rule.
//
// All operations are pure functions of (inputs, RngSeed). Restart r and
// Monte-Carlo replicate b consume derived sub-streams, so parallel execution
// reproduces the sequential result bit for bit.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "marketdef/matrix.hpp"
#include "marketdef/rng.hpp"

namespace marketdef {

struct ClusterAssignment {
    std::vector<int> labels;        // length n, values in [0, k)
    Matrix centers;                 // k x d
    std::vector<double> within_ss;  // per-cluster sum of squared distances to center
    double tot_within_ss = 0.0;
    int iterations = 0;
    std::size_t k = 0;
};

struct Dendrogram {
    struct Merge {
        int left;      // node id: leaves are 0..n-1, merge t creates node n+t
        int right;
        double height; // complete-linkage Euclidean distance at the merge
    };
    std::size_t n = 0;
    std::vector<Merge> merges; // n-1 entries, heights non-decreasing
};

struct KSelectionReport {
    std::vector<int> k_range;      // 1..k_max
    std::vector<double> wk;        // W_K per k
    std::vector<double> log_wk;
    std::vector<double> e_log_wk;  // Monte-Carlo mean of reference log W_K
    std::vector<double> gap;       // e_log_wk - log_wk
    std::vector<double> se;        // simulation standard error
    std::optional<int> selected_k_elbow;
    int selected_k_gap = 0;
};

enum class Seeding { uniform_rows, kmeanspp };
enum class GapReference { uniform_box, pca_box };

inline constexpr int kDefaultMaxIter = 100;
inline constexpr double kDefaultElbowThreshold = 0.2;

// Squared Euclidean distance.
double euclid_sq(std::span<const double> a, std::span<const double> b);

// One round of the seeding roulette wheel, exposed for inspection: squared
// distance of every row to its nearest chosen center, the selection
// probabilities d2/sum(d2), and their running sums (each computed as a
// partial sum divided by the total, so exact rationals stay exact).
struct SeedSelectionTable {
    std::vector<double> d2;
    std::vector<double> prob;
    std::vector<double> cum;
    double total = 0.0;
};
SeedSelectionTable kmeanspp_selection(const Matrix& data, const std::vector<std::size_t>& chosen);

// Distance-weighted seeding: first center is the anchor row when given, else
// a uniform pick; each next center is drawn with probability proportional to
// squared distance from the nearest chosen center. Returns chosen row
// indices in pick order.
std::vector<std::size_t> kmeanspp_seed_rows(const Matrix& data, std::size_t k, RngSeed seed,
                                            std::optional<std::size_t> anchor = std::nullopt);
Matrix kmeanspp_seed(const Matrix& data, std::size_t k, RngSeed seed,
                     std::optional<std::size_t> anchor = std::nullopt);

// k distinct rows drawn uniformly.
Matrix uniform_row_seed(const Matrix& data, std::size_t k, RngSeed seed);

// Lloyd iteration from the given centers. Assignment ties go to the lowest
// center index; an emptied cluster seizes the point farthest from its
// assigned center. `objective_trace`, when non-null, records the objective
// after every iteration (it is non-increasing).
ClusterAssignment lloyd(const Matrix& data, const Matrix& init_centers,
                        int max_iter = kDefaultMaxIter,
                        std::vector<double>* objective_trace = nullptr);

// Best of `restarts` independently seeded Lloyd runs (sub-stream r for
// restart r); minimizes tot_within_ss with ties broken by lowest restart
// index, so the result is independent of execution order and of `threads`.
ClusterAssignment kmeans_restarts(const Matrix& data, std::size_t k, int restarts, RngSeed seed,
                                  std::optional<std::size_t> anchor = std::nullopt,
                                  Seeding seeding = Seeding::kmeanspp, int threads = 1,
                                  int max_iter = kDefaultMaxIter);

// Agglomerative clustering, complete linkage on Euclidean distance.
Dendrogram hclust_complete(const Matrix& data);

// Partition obtained by keeping the first n-k merges; labels numbered by
// first appearance.
std::vector<int> cut_dendrogram(const Dendrogram& dend, std::size_t k);

// Cluster counts read off the `max_candidates` widest gaps between
// consecutive merge heights, sorted ascending. Ties prefer higher cuts
// (fewer clusters).
std::vector<int> candidate_k(const Dendrogram& dend, std::size_t max_candidates);

// W_K of an assignment via the pairwise route: per cluster, the sum of
// squared distances over ordered point pairs divided by twice the cluster
// size; singletons contribute zero.
double pairwise_wk(const Matrix& data, const std::vector<int>& labels, std::size_t k);

// W_K for k = 1..k_max from best-of-restarts assignments (pairwise route).
std::vector<double> elbow_wk(const Matrix& data, std::size_t k_max, int restarts, RngSeed seed,
                             Seeding seeding = Seeding::uniform_rows, int threads = 1);

// Knee rule: smallest k >= 2 whose relative decrease toward k+1 first falls
// below `threshold`; nullopt when the curve never flattens.
std::optional<int> select_k_elbow(const std::vector<double>& wk,
                                  double threshold = kDefaultElbowThreshold);

// Monte-Carlo gap statistic over B reference data sets drawn uniformly in
// the observed per-column box (uniform_box) or in the principal-axis box
// rotated back (pca_box). Selection: smallest k with
// gap[k] >= gap[k+1] - se[k+1], else k_max.
KSelectionReport gap_statistic(const Matrix& data, std::size_t k_max, int B, int restarts,
                               RngSeed seed, GapReference reference = GapReference::uniform_box,
                               int threads = 1,
                               double elbow_threshold = kDefaultElbowThreshold,
                               Seeding seeding = Seeding::uniform_rows);

// Checks the ClusterAssignment contract against the data; throws DomainError
// with the violated condition.
void validate_assignment(const Matrix& data, const ClusterAssignment& a, double tol = 1e-8);

} // namespace marketdef
