#include "mot/assoc/assocnet.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace mot::assoc {

using core::Tensor;

AssocTruth truth_from_one_hot(const Tensor& rows) {
    core::require_rank(rows, 2, "truth_from_one_hot");
    AssocTruth truth;
    truth.n = rows.shape[0];
    const int width = rows.shape[1];
    for (int r = 0; r < truth.n; ++r) {
        int hot = -1;
        for (int k = 0; k < width; ++k) {
            const float v = rows.at2(r, k);
            if (v == 0.f) continue;
            if (v != 1.f || hot >= 0) {
                throw std::invalid_argument("assoc truth: row " + std::to_string(r) + " is not one-hot");
            }
            hot = k;
        }
        if (hot < 0) throw std::invalid_argument("assoc truth: row " + std::to_string(r) + " is all zero");
        truth.cell.push_back(hot);
    }
    return truth;
}

Tensor assemble_assoc_input(const std::vector<sim::LocalSimilarityMap>& locals, int n_max) {
    const int n = static_cast<int>(locals.size());
    if (n > n_max) {
        throw std::invalid_argument("assoc input: " + std::to_string(n) + " targets exceed n_max " +
                                    std::to_string(n_max) + "; raise n_max");
    }
    if (n == 0) throw std::invalid_argument("assoc input: need at least one target");
    const int s = locals[0].size;
    Tensor out({s, s, n_max});
    for (int t = 0; t < n; ++t) {
        const auto& m = locals[static_cast<std::size_t>(t)];
        if (m.size != s) throw std::invalid_argument("assoc input: inconsistent local map sizes");
        for (int iy = 0; iy < s; ++iy)
            for (int ix = 0; ix < s; ++ix) {
                out.v[(static_cast<std::size_t>(iy) * s + ix) * n_max + t] = m.at(ix, iy);
            }
    }
    return out;
}

Tensor build_assoc_masks(const std::vector<sim::LocalSimilarityMap>& locals,
                         const sim::OccupancyGrid& occupancy, int n_max, double m_neg) {
    const int n = static_cast<int>(locals.size());
    if (n == 0 || n > n_max) throw std::invalid_argument("assoc masks: bad target count");
    const int s = locals[0].size;
    Tensor out = Tensor::full({s, s, n_max}, static_cast<float>(m_neg));
    const auto& geom = occupancy.geom;
    for (int t = 0; t < n; ++t) {
        const auto& m = locals[static_cast<std::size_t>(t)];
        for (int iy = 0; iy < s; ++iy) {
            const int gy = m.origin.iy + iy;
            if (gy < 0 || gy >= geom.rows()) continue;
            for (int ix = 0; ix < s; ++ix) {
                const int gx = m.origin.ix + ix;
                if (gx < 0 || gx >= geom.cols()) continue;
                if (occupancy.det_at[static_cast<std::size_t>(gy) * geom.cols() + gx] >= 0) {
                    out.v[(static_cast<std::size_t>(iy) * s + ix) * n_max + t] = 0.f;
                }
            }
        }
    }
    return out;
}

void dump_association_maps(const Tensor& probs, int n, const std::string& path) {
    core::require_rank(probs, 2, "dump_association_maps");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("assoc dump: cannot open " + path);
    char buf[32];
    for (int t = 0; t < n; ++t) {
        for (int k = 0; k < probs.shape[1]; ++k) {
            std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(probs.at2(t, k)));
            os << (k ? " " : "") << buf;
        }
        os << "\n";
    }
}

namespace {

std::int64_t pack_double(double v) {
    std::int64_t out;
    std::memcpy(&out, &v, 8);
    return out;
}

double unpack_double(std::int64_t v) {
    double out;
    std::memcpy(&out, &v, 8);
    return out;
}

} // namespace

void fill_assocnet_checkpoint(AssocNet& net, core::Checkpoint& ck) {
    net.visit_state([&](const std::string& name, Tensor& t) { ck.tensors["assocnet." + name] = t; });
    ck.meta["assocnet.cfg.n_max"] = net.cfg.n_max;
    ck.meta["assocnet.cfg.local_size"] = net.cfg.local_size;
    ck.meta["assocnet.cfg.filters1"] = net.cfg.filters1;
    ck.meta["assocnet.cfg.filters2"] = net.cfg.filters2;
    ck.meta["assocnet.cfg.filters3"] = net.cfg.filters3;
    ck.meta["assocnet.cfg.fc_hidden"] = net.cfg.fc_hidden;
    ck.meta["assocnet.cfg.m_neg"] = pack_double(net.cfg.m_neg);
    ck.meta["assocnet.cfg.fc_floor"] = pack_double(net.cfg.fc_floor);
    ck.meta["assocnet.cfg.lambda_reg"] = pack_double(net.cfg.lambda_reg);
    ck.meta["assocnet.cfg.leaky_alpha"] = pack_double(net.cfg.leaky_alpha);
    ck.meta["assocnet.bn_initialized"] = net.bn_initialized() ? 1 : 0;
}

void read_assocnet_checkpoint(AssocNet& net, const core::Checkpoint& ck) {
    net.visit_state([&](const std::string& name, Tensor& t) {
        const Tensor& src = ck.get("assocnet." + name);
        if (src.shape != t.shape) throw std::runtime_error("assocnet checkpoint: shape mismatch for " + name);
        t = src;
    });
    if (ck.meta_or("assocnet.bn_initialized", 0) != 0) net.mark_bn_initialized();
}

void save_assocnet(AssocNet& net, const std::string& path, std::int64_t epoch) {
    core::Checkpoint ck;
    fill_assocnet_checkpoint(net, ck);
    ck.meta["epoch"] = epoch;
    ck.save(path);
}

AssocNet load_assocnet(const std::string& path) {
    const core::Checkpoint ck = core::Checkpoint::load(path);
    AssocNetConfig cfg;
    cfg.n_max = static_cast<int>(ck.meta_or("assocnet.cfg.n_max", cfg.n_max));
    cfg.local_size = static_cast<int>(ck.meta_or("assocnet.cfg.local_size", cfg.local_size));
    cfg.filters1 = static_cast<int>(ck.meta_or("assocnet.cfg.filters1", cfg.filters1));
    cfg.filters2 = static_cast<int>(ck.meta_or("assocnet.cfg.filters2", cfg.filters2));
    cfg.filters3 = static_cast<int>(ck.meta_or("assocnet.cfg.filters3", cfg.filters3));
    cfg.fc_hidden = static_cast<int>(ck.meta_or("assocnet.cfg.fc_hidden", cfg.fc_hidden));
    cfg.m_neg = unpack_double(ck.meta_or("assocnet.cfg.m_neg", pack_double(cfg.m_neg)));
    cfg.fc_floor = unpack_double(ck.meta_or("assocnet.cfg.fc_floor", pack_double(cfg.fc_floor)));
    cfg.lambda_reg = unpack_double(ck.meta_or("assocnet.cfg.lambda_reg", pack_double(cfg.lambda_reg)));
    cfg.leaky_alpha = unpack_double(ck.meta_or("assocnet.cfg.leaky_alpha", pack_double(cfg.leaky_alpha)));
    core::Rng rng(0);
    AssocNet net = AssocNet::init(cfg, rng);
    read_assocnet_checkpoint(net, ck);
    return net;
}

} // namespace mot::assoc
