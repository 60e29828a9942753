#include "mot/eval/clearmot.hpp"

#include <algorithm>
#include <cstdio>

#include "mot/baseline/assign.hpp"

namespace mot::eval {

void ClearMot::begin_sequence() {
    ++sequence_;
    current_match_.clear();
    last_match_.clear();
}

FrameMatch ClearMot::match_frame(const FrameBoxes& gt, const FrameBoxes& hyp) {
    if (sequence_ < 0) begin_sequence();
    FrameMatch out;
    const int n = gt.size(), m = hyp.size();
    gt_count_ += n;

    std::map<int, int> gt_index, hyp_index;
    for (int i = 0; i < n; ++i) gt_index[gt.ids[static_cast<std::size_t>(i)]] = i;
    for (int j = 0; j < m; ++j) hyp_index[hyp.ids[static_cast<std::size_t>(j)]] = j;

    std::vector<char> gt_done(static_cast<std::size_t>(n), 0), hyp_done(static_cast<std::size_t>(m), 0);

    // identity persistence: keep still-valid pairs from the previous frame
    for (const auto& [gid, hid] : current_match_) {
        auto gi = gt_index.find(gid);
        auto hj = hyp_index.find(hid);
        if (gi == gt_index.end() || hj == hyp_index.end()) continue;
        const double d = geom::center_distance(gt.boxes[static_cast<std::size_t>(gi->second)],
                                               hyp.boxes[static_cast<std::size_t>(hj->second)]);
        if (d > cfg_.match_threshold) continue;
        out.pairs.emplace_back(gi->second, hj->second);
        gt_done[static_cast<std::size_t>(gi->second)] = 1;
        hyp_done[static_cast<std::size_t>(hj->second)] = 1;
        dist_sum_ += d;
    }

    // optimal matching of the remainder within the threshold
    std::vector<int> grem, hrem;
    for (int i = 0; i < n; ++i) {
        if (!gt_done[static_cast<std::size_t>(i)]) grem.push_back(i);
    }
    for (int j = 0; j < m; ++j) {
        if (!hyp_done[static_cast<std::size_t>(j)]) hrem.push_back(j);
    }
    if (!grem.empty() && !hrem.empty()) {
        baseline::CostMatrix costs(static_cast<int>(grem.size()), static_cast<int>(hrem.size()));
        for (std::size_t a = 0; a < grem.size(); ++a) {
            for (std::size_t b = 0; b < hrem.size(); ++b) {
                const double d = geom::center_distance(gt.boxes[static_cast<std::size_t>(grem[a])],
                                                       hyp.boxes[static_cast<std::size_t>(hrem[b])]);
                if (d > cfg_.match_threshold) {
                    costs.gate(static_cast<int>(a), static_cast<int>(b));
                } else {
                    costs.set(static_cast<int>(a), static_cast<int>(b), d);
                }
            }
        }
        const baseline::Assignment assign = baseline::hungarian_solve(costs);
        for (const auto& [a, b] : assign.matches) {
            out.pairs.emplace_back(grem[static_cast<std::size_t>(a)], hrem[static_cast<std::size_t>(b)]);
            dist_sum_ += costs.at(a, b);
        }
    }

    std::sort(out.pairs.begin(), out.pairs.end());
    out.false_positives = m - static_cast<int>(out.pairs.size());
    out.false_negatives = n - static_cast<int>(out.pairs.size());
    fp_ += out.false_positives;
    fn_ += out.false_negatives;
    matches_ += static_cast<std::int64_t>(out.pairs.size());

    // identity switches vs the most recent match, trajectory bookkeeping
    std::vector<char> gt_matched(static_cast<std::size_t>(n), 0);
    std::map<int, int> new_current;
    for (const auto& [gi, hj] : out.pairs) {
        const int gid = gt.ids[static_cast<std::size_t>(gi)];
        const int hid = hyp.ids[static_cast<std::size_t>(hj)];
        auto prev = last_match_.find(gid);
        if (prev != last_match_.end() && prev->second != hid) {
            ++ids_;
            ++out.id_switches;
        }
        last_match_[gid] = hid;
        new_current[gid] = hid;
        gt_matched[static_cast<std::size_t>(gi)] = 1;
    }
    current_match_ = std::move(new_current);

    for (int i = 0; i < n; ++i) {
        Trajectory& tr = trajectories_[{sequence_, gt.ids[static_cast<std::size_t>(i)]}];
        ++tr.present;
        if (gt_matched[static_cast<std::size_t>(i)]) {
            ++tr.tracked;
            if (tr.interrupted) {
                ++frag_;
                tr.interrupted = false;
            }
            tr.tracked_ever = true;
        } else if (tr.tracked_ever) {
            tr.interrupted = true;
        }
    }
    return out;
}

MotReport ClearMot::report() const {
    MotReport r;
    r.fp = static_cast<int>(fp_);
    r.fn = static_cast<int>(fn_);
    r.ids = static_cast<int>(ids_);
    r.frag = static_cast<int>(frag_);
    r.gt_count = static_cast<int>(gt_count_);
    r.gt_trajectories = static_cast<int>(trajectories_.size());
    r.matches = static_cast<int>(matches_);

    if (gt_count_ > 0) {
        r.mota = 100.0 * (1.0 - static_cast<double>(fp_ + fn_ + ids_) / static_cast<double>(gt_count_));
    } else {
        r.mota_defined = false;
    }
    if (matches_ > 0) {
        r.motp = 100.0 * (1.0 - (dist_sum_ / static_cast<double>(matches_)) / cfg_.match_threshold);
    } else {
        r.motp_defined = false;
    }

    int mt = 0, ml = 0;
    for (const auto& [key, tr] : trajectories_) {
        (void)key;
        const double ratio = tr.present > 0 ? static_cast<double>(tr.tracked) / tr.present : 0.0;
        if (ratio >= 0.8) {
            ++mt;
        } else if (ratio <= 0.2) {
            ++ml;
        }
    }
    if (!trajectories_.empty()) {
        const double total = static_cast<double>(trajectories_.size());
        r.mt = 100.0 * mt / total;
        r.ml = 100.0 * ml / total;
        r.pt = 100.0 - r.mt - r.ml;
    }
    return r;
}

MotReport evaluate_sequences(const std::vector<std::vector<FrameBoxes>>& gt,
                             const std::vector<std::vector<FrameBoxes>>& hyp, MotConfig cfg) {
    if (gt.size() != hyp.size()) throw std::invalid_argument("evaluate_sequences: sequence count mismatch");
    ClearMot acc(cfg);
    for (std::size_t s = 0; s < gt.size(); ++s) {
        if (gt[s].size() != hyp[s].size()) {
            throw std::invalid_argument("evaluate_sequences: frame count mismatch in sequence " +
                                        std::to_string(s));
        }
        acc.begin_sequence();
        for (std::size_t f = 0; f < gt[s].size(); ++f) acc.match_frame(gt[s][f], hyp[s][f]);
    }
    return acc.report();
}

void write_report(const MotReport& r, std::ostream& os, const std::string& label) {
    char buf[256];
    if (!label.empty()) os << label << "\n";
    std::snprintf(buf, sizeof(buf), "%-8s %-8s %-8s %-8s %-8s %-6s %-6s %-6s %-6s %-8s\n", "MOTA", "MOTP",
                  "MT", "PT", "ML", "IDS", "FRAG", "FP", "FN", "GT");
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-8.2f %-8.2f %-8.2f %-8.2f %-8.2f %-6d %-6d %-6d %-6d %-8d\n",
                  r.mota_defined ? r.mota : 0.0, r.motp_defined ? r.motp : 0.0, r.mt, r.pt, r.ml, r.ids,
                  r.frag, r.fp, r.fn, r.gt_count);
    os << buf;
}

void write_report_kv(const MotReport& r, std::ostream& os) {
    char buf[64];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s=%.4f\n", key, v);
        os << buf;
    };
    os << "mota_defined=" << (r.mota_defined ? 1 : 0) << "\n";
    put("MOTA", r.mota_defined ? r.mota : 0.0);
    os << "motp_defined=" << (r.motp_defined ? 1 : 0) << "\n";
    put("MOTP", r.motp_defined ? r.motp : 0.0);
    put("MT", r.mt);
    put("PT", r.pt);
    put("ML", r.ml);
    os << "IDS=" << r.ids << "\nFRAG=" << r.frag << "\nFP=" << r.fp << "\nFN=" << r.fn
       << "\nGT=" << r.gt_count << "\nTRAJECTORIES=" << r.gt_trajectories << "\nMATCHES=" << r.matches
       << "\n";
}

} // namespace mot::eval
