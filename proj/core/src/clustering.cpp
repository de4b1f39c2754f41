#include "marketdef/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "marketdef/linalg.hpp"

namespace marketdef {

namespace {

// Runs fn(i) for i in [0, count), striped across `threads` workers. Callers
// write results into pre-sized slots, so scheduling never affects output.
template <typename Fn>
void for_indexed(std::size_t count, int threads, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(std::max(threads, 1), count == 0 ? 1 : count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex error_mu;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                const std::scoped_lock lock(error_mu);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

bool rows_equal(const Matrix& m, std::size_t a, std::size_t b) {
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (m(a, c) != m(b, c)) return false;
    return true;
}

std::size_t count_distinct_rows(const Matrix& m) {
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        bool dup = false;
        for (std::size_t j = 0; j < i && !dup; ++j) dup = rows_equal(m, i, j);
        if (!dup) ++distinct;
    }
    return distinct;
}

int nearest_center(const Matrix& data, std::size_t row, const Matrix& centers) {
    int best = 0;
    double best_d = euclid_sq(data.row(row), centers.row(0));
    for (std::size_t c = 1; c < centers.rows(); ++c) {
        const double d = euclid_sq(data.row(row), centers.row(c));
        if (d < best_d) { // strict: ties stay with the lowest index
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

void recompute_means(const Matrix& data, const std::vector<int>& labels, Matrix& centers) {
    const std::size_t k = centers.rows();
    const std::size_t d = centers.cols();
    std::vector<std::size_t> counts(k, 0);
    Matrix sums(k, d, 0.0);
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const auto c = static_cast<std::size_t>(labels[r]);
        ++counts[c];
        for (std::size_t j = 0; j < d; ++j) sums(c, j) += data(r, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue; // repaired by the caller
        for (std::size_t j = 0; j < d; ++j) centers(c, j) = sums(c, j) / static_cast<double>(counts[c]);
    }
}

// Gives every empty cluster the point currently farthest from its own
// center; only clusters with two or more members can donate.
void repair_empty_clusters(const Matrix& data, std::vector<int>& labels, Matrix& centers) {
    const std::size_t k = centers.rows();
    std::vector<std::size_t> counts(k, 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];

    for (std::size_t e = 0; e < k; ++e) {
        if (counts[e] != 0) continue;
        std::size_t victim = data.rows();
        double worst = -1.0;
        for (std::size_t r = 0; r < data.rows(); ++r) {
            const auto c = static_cast<std::size_t>(labels[r]);
            if (counts[c] < 2) continue;
            const double d = euclid_sq(data.row(r), centers.row(c));
            if (d > worst) {
                worst = d;
                victim = r;
            }
        }
        if (victim == data.rows())
            throw DomainError("k-means: cannot repair empty cluster (k exceeds distinct points)");
        --counts[static_cast<std::size_t>(labels[victim])];
        labels[victim] = static_cast<int>(e);
        counts[e] = 1;
        for (std::size_t j = 0; j < data.cols(); ++j) centers(e, j) = data(victim, j);
    }
}

double objective(const Matrix& data, const std::vector<int>& labels, const Matrix& centers) {
    double phi = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r)
        phi += euclid_sq(data.row(r), centers.row(static_cast<std::size_t>(labels[r])));
    return phi;
}

} // namespace

double euclid_sq(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("euclid_sq: vector lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

SeedSelectionTable kmeanspp_selection(const Matrix& data, const std::vector<std::size_t>& chosen) {
    if (chosen.empty()) throw DomainError("kmeanspp_selection: no centers chosen yet");
    const std::size_t n = data.rows();
    SeedSelectionTable t;
    t.d2.resize(n);
    t.prob.resize(n);
    t.cum.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c : chosen) best = std::min(best, euclid_sq(data.row(r), data.row(c)));
        t.d2[r] = best;
        t.total += best;
    }
    double partial = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        partial += t.d2[r];
        if (t.total > 0.0) {
            t.prob[r] = t.d2[r] / t.total;
            t.cum[r] = partial / t.total; // divide last: k/total stays exact
        }
    }
    return t;
}

std::vector<std::size_t> kmeanspp_seed_rows(const Matrix& data, std::size_t k, RngSeed seed,
                                            std::optional<std::size_t> anchor) {
    const std::size_t n = data.rows();
    if (k < 1 || k > n) throw DomainError("kmeanspp_seed: k must be in [1, n]");
    if (anchor && *anchor >= n) throw DomainError("kmeanspp_seed: anchor row out of range");

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    chosen.push_back(anchor ? *anchor : static_cast<std::size_t>(rng.next_below(n)));

    while (chosen.size() < k) {
        const SeedSelectionTable t = kmeanspp_selection(data, chosen);
        if (t.total > 0.0) {
            const double u = rng.next_double();
            std::size_t pick = n - 1;
            for (std::size_t r = 0; r < n; ++r) {
                if (u < t.cum[r]) {
                    pick = r;
                    break;
                }
            }
            chosen.push_back(pick);
            continue;
        }
        // Every remaining row coincides with a chosen center.
        std::vector<std::size_t> candidates;
        for (std::size_t r = 0; r < n; ++r) {
            if (std::find(chosen.begin(), chosen.end(), r) != chosen.end()) continue;
            bool dup = false;
            for (std::size_t c : chosen) dup = dup || rows_equal(data, r, c);
            if (!dup) candidates.push_back(r);
        }
        if (candidates.empty())
            throw DomainError("kmeanspp_seed: fewer than k distinct rows (" +
                              std::to_string(count_distinct_rows(data)) + " < " +
                              std::to_string(k) + ")");
        chosen.push_back(candidates[rng.next_below(candidates.size())]);
    }
    return chosen;
}

Matrix kmeanspp_seed(const Matrix& data, std::size_t k, RngSeed seed,
                     std::optional<std::size_t> anchor) {
    const auto rows = kmeanspp_seed_rows(data, k, seed, anchor);
    Matrix centers(k, data.cols());
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < data.cols(); ++j) centers(i, j) = data(rows[i], j);
    return centers;
}

Matrix uniform_row_seed(const Matrix& data, std::size_t k, RngSeed seed) {
    if (k < 1 || k > data.rows()) throw DomainError("uniform_row_seed: k must be in [1, n]");
    Rng rng(seed);
    const auto rows = rng.sample_without_replacement(data.rows(), k);
    Matrix centers(k, data.cols());
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < data.cols(); ++j) centers(i, j) = data(rows[i], j);
    return centers;
}

ClusterAssignment lloyd(const Matrix& data, const Matrix& init_centers, int max_iter,
                        std::vector<double>* objective_trace) {
    const std::size_t n = data.rows();
    const std::size_t k = init_centers.rows();
    if (init_centers.cols() != data.cols()) throw DimensionError("lloyd: center width mismatch");
    if (k < 1 || k > n) throw DomainError("lloyd: k must be in [1, n]");
    if (max_iter < 1) throw DomainError("lloyd: max_iter must be at least 1");

    Matrix centers = init_centers;
    std::vector<int> labels(n);
    for (std::size_t r = 0; r < n; ++r) labels[r] = nearest_center(data, r, centers);
    repair_empty_clusters(data, labels, centers);

    ClusterAssignment out;
    out.k = k;
    int it = 0;
    while (it < max_iter) {
        ++it;
        recompute_means(data, labels, centers);
        std::vector<int> next(n);
        for (std::size_t r = 0; r < n; ++r) next[r] = nearest_center(data, r, centers);
        repair_empty_clusters(data, next, centers);
        if (objective_trace) objective_trace->push_back(objective(data, next, centers));
        const bool stable = next == labels;
        labels = std::move(next);
        if (stable) break;
    }

    recompute_means(data, labels, centers);
    out.labels = std::move(labels);
    out.centers = std::move(centers);
    out.iterations = it;
    out.within_ss.assign(k, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const auto c = static_cast<std::size_t>(out.labels[r]);
        out.within_ss[c] += euclid_sq(data.row(r), out.centers.row(c));
    }
    for (double w : out.within_ss) out.tot_within_ss += w;
    return out;
}

ClusterAssignment kmeans_restarts(const Matrix& data, std::size_t k, int restarts, RngSeed seed,
                                  std::optional<std::size_t> anchor, Seeding seeding, int threads,
                                  int max_iter) {
    if (restarts < 1) throw DomainError("kmeans_restarts: restarts must be at least 1");

    struct Slot {
        ClusterAssignment a;
        double wss = std::numeric_limits<double>::infinity();
        int r = -1;
    };
    const std::size_t workers =
        std::min<std::size_t>(std::max(threads, 1), static_cast<std::size_t>(restarts));
    std::vector<Slot> best(workers);

    for_indexed(static_cast<std::size_t>(restarts), threads, [&](std::size_t r) {
        const RngSeed sub = seed.child(r);
        const Matrix init = seeding == Seeding::kmeanspp ? kmeanspp_seed(data, k, sub, anchor)
                                                         : uniform_row_seed(data, k, sub);
        ClusterAssignment a = lloyd(data, init, max_iter);
        Slot& slot = best[r % workers];
        const int ri = static_cast<int>(r);
        if (a.tot_within_ss < slot.wss || (a.tot_within_ss == slot.wss && ri < slot.r)) {
            slot.wss = a.tot_within_ss;
            slot.r = ri;
            slot.a = std::move(a);
        }
    });

    // (wss, restart index) is a total order, so the merged minimum is the
    // same whatever the worker count.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < best.size(); ++i) {
        if (best[i].r < 0) continue;
        if (best[arg].r < 0 || best[i].wss < best[arg].wss ||
            (best[i].wss == best[arg].wss && best[i].r < best[arg].r))
            arg = i;
    }
    return std::move(best[arg].a);
}

Dendrogram hclust_complete(const Matrix& data) {
    const std::size_t n = data.rows();
    if (n < 2) throw DomainError("hclust_complete: need at least 2 points");

    // Cluster-to-cluster complete-linkage distances, updated in place.
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = std::sqrt(euclid_sq(data.row(i), data.row(j)));

    std::vector<bool> active(n, true);
    struct RawMerge {
        std::size_t a; // surviving slot indices at merge time
        std::size_t b;
        double height;
    };
    std::vector<RawMerge> raw;
    raw.reserve(n - 1);

    // Nearest-neighbor chain; complete linkage is reducible, so every
    // reciprocal pair is a valid merge.
    std::vector<std::size_t> chain;
    std::size_t merges_done = 0;
    while (merges_done < n - 1) {
        if (chain.empty()) {
            for (std::size_t i = 0; i < n; ++i)
                if (active[i]) {
                    chain.push_back(i);
                    break;
                }
        }
        const std::size_t top = chain.back();
        std::size_t nn = n;
        double nn_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j] || j == top) continue;
            if (dist[top][j] < nn_d) {
                nn_d = dist[top][j];
                nn = j;
            }
        }
        if (chain.size() >= 2 && nn == chain[chain.size() - 2]) {
            const std::size_t a = std::min(top, nn);
            const std::size_t b = std::max(top, nn);
            raw.push_back({a, b, nn_d});
            ++merges_done;
            // Lance-Williams for complete linkage: max of the two distances.
            for (std::size_t j = 0; j < n; ++j) {
                if (!active[j] || j == a || j == b) continue;
                dist[a][j] = dist[j][a] = std::max(dist[a][j], dist[b][j]);
            }
            active[b] = false;
            chain.pop_back();
            chain.pop_back();
        } else {
            chain.push_back(nn);
        }
    }

    // Order merges by height and relabel nodes scipy-style: leaves first,
    // then one internal node per merge in height order.
    std::vector<std::size_t> order(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return raw[l].height < raw[r].height;
    });

    std::vector<int> node_of(n);   // current node id of each slot's cluster
    std::vector<std::size_t> root(n); // union-find over slots
    for (std::size_t i = 0; i < n; ++i) {
        node_of[i] = static_cast<int>(i);
        root[i] = i;
    }
    auto find = [&](std::size_t x) {
        while (root[x] != x) {
            root[x] = root[root[x]];
            x = root[x];
        }
        return x;
    };

    Dendrogram out;
    out.n = n;
    out.merges.reserve(n - 1);
    for (std::size_t t = 0; t < order.size(); ++t) {
        const RawMerge& m = raw[order[t]];
        const std::size_t ra = find(m.a);
        const std::size_t rb = find(m.b);
        int left = node_of[ra];
        int right = node_of[rb];
        if (left > right) std::swap(left, right);
        out.merges.push_back({left, right, m.height});
        root[rb] = ra;
        node_of[ra] = static_cast<int>(n + t);
    }
    return out;
}

std::vector<int> cut_dendrogram(const Dendrogram& dend, std::size_t k) {
    const std::size_t n = dend.n;
    if (k < 1 || k > n) throw DomainError("cut_dendrogram: k must be in [1, n]");

    std::vector<std::size_t> root(2 * n - 1);
    for (std::size_t i = 0; i < root.size(); ++i) root[i] = i;
    auto find = [&](std::size_t x) {
        while (root[x] != x) {
            root[x] = root[root[x]];
            x = root[x];
        }
        return x;
    };
    for (std::size_t t = 0; t + k < n; ++t) {
        const auto& m = dend.merges[t];
        const std::size_t node = n + t;
        root[find(static_cast<std::size_t>(m.left))] = node;
        root[find(static_cast<std::size_t>(m.right))] = node;
    }

    std::vector<int> labels(n, -1);
    int next = 0;
    std::vector<int> label_of(2 * n - 1, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (label_of[r] < 0) label_of[r] = next++;
        labels[i] = label_of[r];
    }
    return labels;
}

std::vector<int> candidate_k(const Dendrogram& dend, std::size_t max_candidates) {
    if (max_candidates < 1) throw DomainError("candidate_k: max_candidates must be at least 1");
    const std::size_t n = dend.n;
    if (dend.merges.size() < 2) return {2};

    // Cutting between merges i and i+1 leaves n-i-1 clusters; enumerate those
    // cuts top-down so ties prefer fewer clusters.
    struct Cut {
        int k;
        double gap;
    };
    std::vector<Cut> cuts;
    for (std::size_t i = 0; i + 1 < dend.merges.size(); ++i) {
        const double gap = dend.merges[i + 1].height - dend.merges[i].height;
        cuts.push_back({static_cast<int>(n - i - 1), gap});
    }
    std::stable_sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) {
        if (a.gap != b.gap) return a.gap > b.gap;
        return a.k < b.k;
    });

    const std::size_t take = std::min(max_candidates, cuts.size());
    std::vector<int> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(cuts[i].k);
    std::sort(out.begin(), out.end());
    return out;
}

double pairwise_wk(const Matrix& data, const std::vector<int>& labels, std::size_t k) {
    if (labels.size() != data.rows()) throw DimensionError("pairwise_wk: label length mismatch");
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        const int l = labels[r];
        if (l < 0 || static_cast<std::size_t>(l) >= k)
            throw DomainError("pairwise_wk: label out of range");
        members[static_cast<std::size_t>(l)].push_back(r);
    }
    double w = 0.0;
    for (const auto& rows : members) {
        if (rows.size() < 2) continue; // singleton contributes zero
        double d = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = i + 1; j < rows.size(); ++j)
                d += euclid_sq(data.row(rows[i]), data.row(rows[j]));
        // d holds unordered pairs; the ordered-pair sum is twice that.
        w += 2.0 * d / (2.0 * static_cast<double>(rows.size()));
    }
    return w;
}

std::vector<double> elbow_wk(const Matrix& data, std::size_t k_max, int restarts, RngSeed seed,
                             Seeding seeding, int threads) {
    if (k_max < 1 || k_max > data.rows()) throw DomainError("elbow_wk: k_max must be in [1, n]");
    std::vector<double> wk(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) {
        const ClusterAssignment a =
            kmeans_restarts(data, k, restarts, seed.child(k), std::nullopt, seeding, threads);
        wk[k - 1] = pairwise_wk(data, a.labels, k);
    }
    return wk;
}

std::optional<int> select_k_elbow(const std::vector<double>& wk, double threshold) {
    if (wk.size() < 3) throw DomainError("select_k_elbow: need at least 3 W_K values");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw DomainError("select_k_elbow: threshold must lie in (0, 1)");
    for (double w : wk)
        if (!(w > 0.0)) throw DomainError("select_k_elbow: W_K values must be positive");

    // wk[i] is W_{i+1}; the decrease from k to k+1 lives at indices k-1, k.
    for (std::size_t k = 2; k < wk.size(); ++k) {
        const double drop = (wk[k - 1] - wk[k]) / wk[k - 1];
        if (drop < threshold) return static_cast<int>(k);
    }
    return std::nullopt;
}

namespace {

struct ColumnBox {
    std::vector<double> lo, hi;
};

// Observed per-column ranges; a degenerate column pins its coordinate.
ColumnBox column_box(const Matrix& data) {
    const std::size_t d = data.cols();
    ColumnBox box;
    box.lo.resize(d);
    box.hi.resize(d);
    bool any_spread = false;
    for (std::size_t c = 0; c < d; ++c) {
        box.lo[c] = box.hi[c] = data(0, c);
        for (std::size_t r = 1; r < data.rows(); ++r) {
            box.lo[c] = std::min(box.lo[c], data(r, c));
            box.hi[c] = std::max(box.hi[c], data(r, c));
        }
        any_spread = any_spread || box.hi[c] > box.lo[c];
    }
    if (!any_spread)
        throw DomainError("gap_statistic: all columns degenerate; no reference box");
    return box;
}

Matrix reference_uniform_box(const ColumnBox& box, std::size_t n, Rng& rng) {
    const std::size_t d = box.lo.size();
    Matrix ref(n, d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c)
            ref(r, c) = box.lo[c] + rng.next_double() * (box.hi[c] - box.lo[c]);
    return ref;
}

struct PcaFrame {
    std::vector<double> mu;
    Matrix axes; // d x d, columns are principal directions
    std::vector<double> lo, hi;
};

PcaFrame pca_frame(const Matrix& data) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    PcaFrame f;
    f.mu = column_means(data);
    f.axes = eigen_symmetric(covariance(data)).vectors;
    f.lo.assign(d, std::numeric_limits<double>::infinity());
    f.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += (data(r, c) - f.mu[c]) * f.axes(c, j);
            f.lo[j] = std::min(f.lo[j], s);
            f.hi[j] = std::max(f.hi[j], s);
        }
    }
    bool any_spread = false;
    for (std::size_t j = 0; j < d; ++j) any_spread = any_spread || f.hi[j] > f.lo[j];
    if (!any_spread)
        throw DomainError("gap_statistic: all columns degenerate; no reference box");
    return f;
}

Matrix reference_pca_box(const Matrix& data, const PcaFrame& f, Rng& rng) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    Matrix ref(n, d);
    std::vector<double> z(d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < d; ++j) z[j] = f.lo[j] + rng.next_double() * (f.hi[j] - f.lo[j]);
        for (std::size_t c = 0; c < d; ++c) {
            double s = f.mu[c];
            for (std::size_t j = 0; j < d; ++j) s += z[j] * f.axes(c, j);
            ref(r, c) = s;
        }
    }
    return ref;
}

std::vector<double> log_wk_curve(const Matrix& data, std::size_t k_max, int restarts,
                                 RngSeed seed, Seeding seeding, int threads) {
    std::vector<double> out(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) {
        const ClusterAssignment a =
            kmeans_restarts(data, k, restarts, seed.child(k), std::nullopt, seeding, threads);
        if (!(a.tot_within_ss > 0.0))
            throw DomainError("gap_statistic: W_K vanished at k=" + std::to_string(k) +
                              " (duplicate-dominated data)");
        out[k - 1] = std::log(a.tot_within_ss);
    }
    return out;
}

} // namespace

KSelectionReport gap_statistic(const Matrix& data, std::size_t k_max, int B, int restarts,
                               RngSeed seed, GapReference reference, int threads,
                               double elbow_threshold, Seeding seeding) {
    const std::size_t n = data.rows();
    if (k_max < 1 || k_max >= n) throw DomainError("gap_statistic: need 1 <= k_max < n");
    if (B < 2) throw DomainError("gap_statistic: need B >= 2 reference sets");

    KSelectionReport rep;
    rep.k_range.resize(k_max);
    for (std::size_t k = 0; k < k_max; ++k) rep.k_range[k] = static_cast<int>(k + 1);

    rep.log_wk = log_wk_curve(data, k_max, restarts, seed.child(0), seeding, threads);
    rep.wk.resize(k_max);
    for (std::size_t k = 0; k < k_max; ++k) rep.wk[k] = std::exp(rep.log_wk[k]);

    std::optional<PcaFrame> frame;
    std::optional<ColumnBox> box;
    if (reference == GapReference::pca_box) frame = pca_frame(data);
    else box = column_box(data);

    // Reference curves: replicate b draws from sub-stream (1, b); within a
    // replicate, draw the data set first, then cluster per k.
    const RngSeed ref_seed = seed.child(1);
    std::vector<std::vector<double>> ref_log(static_cast<std::size_t>(B));
    for_indexed(static_cast<std::size_t>(B), threads, [&](std::size_t b) {
        const RngSeed sb = ref_seed.child(b);
        Rng gen(sb.child(0));
        const Matrix ref = frame ? reference_pca_box(data, *frame, gen)
                                 : reference_uniform_box(*box, n, gen);
        ref_log[b] = log_wk_curve(ref, k_max, restarts, sb, seeding, 1);
    });

    rep.e_log_wk.assign(k_max, 0.0);
    rep.se.assign(k_max, 0.0);
    rep.gap.assign(k_max, 0.0);
    for (std::size_t k = 0; k < k_max; ++k) {
        double m = 0.0;
        for (int b = 0; b < B; ++b) m += ref_log[static_cast<std::size_t>(b)][k];
        m /= B;
        double ss = 0.0;
        for (int b = 0; b < B; ++b) {
            const double d = ref_log[static_cast<std::size_t>(b)][k] - m;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / (B - 1));
        rep.e_log_wk[k] = m;
        rep.se[k] = sd * std::sqrt(1.0 + 1.0 / B);
        rep.gap[k] = m - rep.log_wk[k];
    }

    rep.selected_k_gap = static_cast<int>(k_max);
    for (std::size_t k = 0; k + 1 < k_max; ++k) {
        if (rep.gap[k] >= rep.gap[k + 1] - rep.se[k + 1]) {
            rep.selected_k_gap = static_cast<int>(k + 1);
            break;
        }
    }

    if (k_max >= 3) rep.selected_k_elbow = select_k_elbow(rep.wk, elbow_threshold);
    return rep;
}

void validate_assignment(const Matrix& data, const ClusterAssignment& a, double tol) {
    const std::size_t n = data.rows();
    const std::size_t k = a.k;
    if (a.labels.size() != n) throw DomainError("assignment: label count mismatch");
    std::vector<std::size_t> counts(k, 0);
    for (int l : a.labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= k)
            throw DomainError("assignment: label out of range");
        ++counts[static_cast<std::size_t>(l)];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] == 0) throw DomainError("assignment: empty cluster " + std::to_string(c));

    Matrix means(k, data.cols(), 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < data.cols(); ++j)
            means(static_cast<std::size_t>(a.labels[r]), j) += data(r, j);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < data.cols(); ++j) {
            means(c, j) /= static_cast<double>(counts[c]);
            if (std::abs(means(c, j) - a.centers(c, j)) > tol)
                throw DomainError("assignment: center is not the member mean");
        }

    double tot = 0.0;
    for (double w : a.within_ss) tot += w;
    if (std::abs(tot - a.tot_within_ss) > tol)
        throw DomainError("assignment: tot_within_ss does not sum");

    for (std::size_t r = 0; r < n; ++r) {
        const double own = euclid_sq(data.row(r), a.centers.row(static_cast<std::size_t>(a.labels[r])));
        for (std::size_t c = 0; c < k; ++c)
            if (euclid_sq(data.row(r), a.centers.row(c)) < own - 1e-10)
                throw DomainError("assignment: point closer to a foreign center");
    }
}

} // namespace marketdef
