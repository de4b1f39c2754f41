#include "marketdef/report.hpp"

#include <cstdint>

#include "json_io.hpp"

namespace marketdef {

namespace detail {

json cluster_to_json(const ClusterAssignment& a) {
    json centers = json::array();
    for (std::size_t r = 0; r < a.centers.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < a.centers.cols(); ++c) row.push_back(a.centers(r, c));
        centers.push_back(std::move(row));
    }
    return json{
        {"centers", std::move(centers)},
        {"iterations", a.iterations},
        {"k", a.k},
        {"labels", a.labels},
        {"tot_within_ss", a.tot_within_ss},
        {"within_ss", a.within_ss},
    };
}

json kselection_to_json(const KSelectionReport& r) {
    json j{
        {"e_log_wk", r.e_log_wk},
        {"gap", r.gap},
        {"k_range", r.k_range},
        {"log_wk", r.log_wk},
        {"se", r.se},
        {"selected_k_gap", r.selected_k_gap},
        {"wk", r.wk},
    };
    if (r.selected_k_elbow) j["selected_k_elbow"] = *r.selected_k_elbow;
    else j["selected_k_elbow"] = nullptr;
    return j;
}

json verdict_to_json(const ClaVerdict& v) {
    return json{
        {"actual_loss_pct", v.actual_loss_pct},
        {"critical_loss_pct", v.critical_loss_pct},
        {"discouraged", v.discouraged},
        {"method", to_string(v.method)},
        {"profitable", v.profitable},
    };
}

json screening_to_json(const ScreeningReport& r) {
    json shares = json::object();
    for (std::size_t i = 0; i < r.post_shares.labels.size(); ++i)
        shares[r.post_shares.labels[i]] = r.post_shares.shares_pct[i];
    return json{
        {"action", to_string(r.action)},
        {"class_post", to_string(r.class_post)},
        {"class_pre", to_string(r.class_pre)},
        {"delta", r.delta},
        {"hhi_post", r.hhi_post},
        {"hhi_pre", r.hhi_pre},
        {"post_shares", std::move(shares)},
        {"renormalized", r.renormalized},
    };
}

} // namespace detail

std::string to_json(const ClusterAssignment& a) { return detail::dump(detail::cluster_to_json(a)); }
std::string to_json(const KSelectionReport& r) {
    return detail::dump(detail::kselection_to_json(r));
}
std::string to_json(const ClaVerdict& v) { return detail::dump(detail::verdict_to_json(v)); }
std::string to_json(const ScreeningReport& r) {
    return detail::dump(detail::screening_to_json(r));
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

} // namespace marketdef
