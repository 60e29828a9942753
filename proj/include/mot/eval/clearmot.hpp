#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "mot/geom.hpp"

namespace mot::eval {

struct MotConfig {
    double match_threshold = 1.0; // m, 3D center distance
};

struct FrameBoxes {
    std::vector<int> ids;
    std::vector<geom::BoundingBox3D> boxes;

    void add(int id, const geom::BoundingBox3D& b) {
        ids.push_back(id);
        boxes.push_back(b);
    }
    int size() const { return static_cast<int>(ids.size()); }
};

struct FrameMatch {
    std::vector<std::pair<int, int>> pairs; // (gt index, hyp index)
    int false_positives = 0;
    int false_negatives = 0;
    int id_switches = 0;
};

struct MotReport {
    double mota = 0.0; // percent
    double motp = 0.0; // percent, (1 - meanDist/threshold)*100
    double mt = 0.0, pt = 0.0, ml = 0.0; // percent of trajectories
    int ids = 0;
    int frag = 0;
    int fp = 0;
    int fn = 0;
    int gt_count = 0;        // ground-truth boxes over all frames
    int gt_trajectories = 0;
    int matches = 0;
    bool mota_defined = true;
    bool motp_defined = true;
};

/// CLEAR MOT bookkeeping over one or more sequences.
///
/// Matching keeps still-valid previous-frame pairs first, then matches the
/// rest optimally by center distance within the threshold. An identity
/// switch is counted when a ground truth matches a different hypothesis than
/// its most recent match (gaps included). A fragmentation is counted when a
/// trajectory resumes being tracked after an interruption.
class ClearMot {
public:
    explicit ClearMot(MotConfig cfg = {}) : cfg_(cfg) {}

    /// Starts a new sequence: correspondence and trajectory scopes reset,
    /// accumulated counts continue.
    void begin_sequence();

    FrameMatch match_frame(const FrameBoxes& gt, const FrameBoxes& hyp);

    MotReport report() const;

private:
    struct Trajectory {
        int present = 0;
        int tracked = 0;
        bool tracked_ever = false;
        bool interrupted = false;
    };

    MotConfig cfg_;
    int sequence_ = -1;
    std::map<int, int> current_match_; // gt id -> hyp id, valid last frame
    std::map<int, int> last_match_;    // gt id -> most recent hyp id, survives gaps
    std::map<std::pair<int, int>, Trajectory> trajectories_; // (sequence, gt id)
    std::int64_t fp_ = 0, fn_ = 0, ids_ = 0, frag_ = 0, gt_count_ = 0, matches_ = 0;
    double dist_sum_ = 0.0;
};

/// Convenience wrapper: evaluates parallel per-frame box lists.
MotReport evaluate_sequences(const std::vector<std::vector<FrameBoxes>>& gt,
                             const std::vector<std::vector<FrameBoxes>>& hyp, MotConfig cfg = {});

/// Aligned human-readable table.
void write_report(const MotReport& r, std::ostream& os, const std::string& label = "");
/// Machine-readable key=value lines.
void write_report_kv(const MotReport& r, std::ostream& os);

} // namespace mot::eval
