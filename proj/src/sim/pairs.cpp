#include "mot/sim/pairs.hpp"

#include <fstream>

#include "mot/core/binio.hpp"

namespace mot::sim {

namespace {

constexpr char kMagic[8] = {'M', 'O', 'T', 'P', 'A', 'I', 'R', '1'};

geom::BoundingBox3D jitter_box(const geom::BoundingBox3D& box, const PairGenConfig& cfg, core::Rng& rng) {
    geom::BoundingBox3D out = box;
    out.cx += cfg.jitter_pos_sigma * rng.normal();
    out.cy += cfg.jitter_pos_sigma * rng.normal();
    out.cz += 0.5 * cfg.jitter_pos_sigma * rng.normal();
    out.l = std::max(0.2, out.l * (1.0 + cfg.jitter_dim_sigma * rng.normal()));
    out.w = std::max(0.2, out.w * (1.0 + cfg.jitter_dim_sigma * rng.normal()));
    out.h = std::max(0.2, out.h * (1.0 + cfg.jitter_dim_sigma * rng.normal()));
    out.yaw = geom::normalize_angle(out.yaw + cfg.jitter_yaw_sigma * rng.normal());
    return out;
}

void write_box(std::ostream& os, const geom::BoundingBox3D& b) {
    using core::binio::put_f32;
    put_f32(os, static_cast<float>(b.cx));
    put_f32(os, static_cast<float>(b.cy));
    put_f32(os, static_cast<float>(b.cz));
    put_f32(os, static_cast<float>(b.l));
    put_f32(os, static_cast<float>(b.w));
    put_f32(os, static_cast<float>(b.h));
    put_f32(os, static_cast<float>(b.yaw));
}

geom::BoundingBox3D read_box(std::istream& is) {
    using core::binio::get_f32;
    geom::BoundingBox3D b;
    b.cx = get_f32(is);
    b.cy = get_f32(is);
    b.cz = get_f32(is);
    b.l = get_f32(is);
    b.w = get_f32(is);
    b.h = get_f32(is);
    b.yaw = get_f32(is);
    return b;
}

} // namespace

std::vector<TrainingPair> generate_training_pairs(const data::Scenario& scenario, const PairGenConfig& cfg,
                                                  std::uint64_t seed) {
    if (scenario.frames.size() < 2) {
        throw std::invalid_argument("generate_training_pairs: need at least 2 consecutive frames");
    }
    core::Rng rng(seed);
    std::vector<TrainingPair> pairs;
    double negative_budget = 0.0;
    const geom::Pose world{};

    for (std::size_t f = 0; f + 1 < scenario.frames.size(); ++f) {
        const data::Frame& prev = scenario.frames[f];
        const data::Frame& cur = scenario.frames[f + 1];
        for (const data::LabeledBox& obj : cur.objects) {
            // the target sample: the same object one frame earlier, in the
            // current frame's ego coordinates
            const data::LabeledBox* before = nullptr;
            for (const auto& p : prev.objects) {
                if (p.id == obj.id) {
                    before = &p;
                    break;
                }
            }
            if (!before) continue;
            const geom::BoundingBox3D target_box = geom::ego_compensate(before->box, world, cur.ego);
            const geom::BoundingBox3D gt_box = geom::ego_compensate(obj.box, world, cur.ego);

            std::vector<geom::BoundingBox3D> accepted;
            for (int p = 0; p < cfg.proposals_per_object; ++p) {
                const geom::BoundingBox3D proposal = jitter_box(gt_box, cfg, rng);
                if (geom::iou_bev(proposal, gt_box) <= cfg.iou_positive) continue;
                bool diverse = true;
                for (const auto& a : accepted) {
                    if (geom::iou_bev(proposal, a) > cfg.iou_diversity) {
                        diverse = false;
                        break;
                    }
                }
                if (!diverse) continue;
                accepted.push_back(proposal);

                TrainingPair pair;
                pair.label = 1;
                pair.target_box = target_box;
                pair.detection_box = proposal;
                pair.target_app = data::synth_appearance(obj.id, cfg.appearance_sigma, rng, cfg.appearance);
                pair.detection_app = data::synth_appearance(obj.id, cfg.appearance_sigma, rng, cfg.appearance);
                pairs.push_back(std::move(pair));

                // negatives against other identities in the current frame
                negative_budget += cfg.negatives_per_positive;
                while (negative_budget >= 1.0 && cur.objects.size() > 1) {
                    negative_budget -= 1.0;
                    const data::LabeledBox* other = nullptr;
                    for (int attempt = 0; attempt < 8 && !other; ++attempt) {
                        const auto& cand =
                            cur.objects[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(cur.objects.size()) - 1))];
                        if (cand.id != obj.id) other = &cand;
                    }
                    if (!other) break;
                    TrainingPair neg;
                    neg.label = -1;
                    neg.target_box = target_box;
                    neg.detection_box = jitter_box(geom::ego_compensate(other->box, world, cur.ego), cfg, rng);
                    neg.target_app = data::synth_appearance(obj.id, cfg.appearance_sigma, rng, cfg.appearance);
                    neg.detection_app =
                        data::synth_appearance(other->id, cfg.appearance_sigma, rng, cfg.appearance);
                    pairs.push_back(std::move(neg));
                }
            }
        }
    }
    return pairs;
}

void save_pairs(const std::vector<TrainingPair>& pairs, const std::string& path) {
    using namespace core::binio;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("pairs: cannot open for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    put_u32(os, 1); // version
    put_u32(os, static_cast<std::uint32_t>(pairs.size()));
    int h = 0, w = 0, c = 0;
    if (!pairs.empty()) {
        h = pairs[0].target_app.shape[0];
        w = pairs[0].target_app.shape[1];
        c = pairs[0].target_app.shape[2];
    }
    put_u32(os, static_cast<std::uint32_t>(h));
    put_u32(os, static_cast<std::uint32_t>(w));
    put_u32(os, static_cast<std::uint32_t>(c));
    for (const TrainingPair& p : pairs) {
        put_u32(os, static_cast<std::uint32_t>(p.label));
        write_box(os, p.target_box);
        write_box(os, p.detection_box);
        for (float x : p.target_app.v) put_f32(os, x);
        for (float x : p.detection_app.v) put_f32(os, x);
    }
    if (!os) throw std::runtime_error("pairs: write failed: " + path);
}

std::vector<TrainingPair> load_pairs(const std::string& path) {
    using namespace core::binio;
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("pairs: cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("pairs: bad magic in " + path);
    if (get_u32(is) != 1) throw std::runtime_error("pairs: unsupported version in " + path);
    const std::uint32_t count = get_u32(is);
    const int h = static_cast<int>(get_u32(is));
    const int w = static_cast<int>(get_u32(is));
    const int c = static_cast<int>(get_u32(is));
    std::vector<TrainingPair> pairs;
    pairs.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        TrainingPair p;
        p.label = static_cast<int>(get_u32(is));
        if (p.label != 1 && static_cast<std::uint32_t>(p.label) != static_cast<std::uint32_t>(-1)) {
            throw std::runtime_error("pairs: bad label in record " + std::to_string(i));
        }
        if (p.label != 1) p.label = -1;
        p.target_box = read_box(is);
        p.detection_box = read_box(is);
        p.target_app = core::Tensor({h, w, c});
        for (auto& x : p.target_app.v) x = get_f32(is);
        p.detection_app = core::Tensor({h, w, c});
        for (auto& x : p.detection_app.v) x = get_f32(is);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

PairBatch make_pair_batch(const std::vector<TrainingPair>& pairs, const std::vector<int>& indices,
                          const data::AppearanceGeometry& geometry) {
    const int b = static_cast<int>(indices.size());
    if (b == 0) throw std::invalid_argument("make_pair_batch: empty batch");
    PairBatch batch;
    batch.boxes = core::Tensor({2 * b, 7});
    batch.appearances = core::Tensor({2 * b, geometry.h, geometry.w, geometry.c});
    batch.labels.resize(static_cast<std::size_t>(b));
    const std::size_t an = static_cast<std::size_t>(geometry.numel());

    auto put_box = [&](int row, const geom::BoundingBox3D& box) {
        box_to_features(box, batch.boxes.data() + static_cast<std::size_t>(row) * 7);
    };
    for (int i = 0; i < b; ++i) {
        const TrainingPair& p = pairs[static_cast<std::size_t>(indices[static_cast<std::size_t>(i)])];
        put_box(i, p.target_box);
        put_box(b + i, p.detection_box);
        std::copy(p.target_app.v.begin(), p.target_app.v.end(),
                  batch.appearances.v.begin() + static_cast<std::ptrdiff_t>(i * an));
        std::copy(p.detection_app.v.begin(), p.detection_app.v.end(),
                  batch.appearances.v.begin() + static_cast<std::ptrdiff_t>((b + i) * an));
        batch.labels[static_cast<std::size_t>(i)] = p.label;
    }
    return batch;
}

} // namespace mot::sim
