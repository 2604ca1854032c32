// Copyright 2026 The text2video Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "t2v/error.hpp"
#include "t2v/guidance.hpp"

namespace t2v {

namespace {

constexpr int kGrid = 8;
constexpr int kCells = kGrid * kGrid;
constexpr double kLuma[3] = {0.299, 0.587, 0.114};

class SurrogateScorer final : public Scorer {
public:
    SurrogateScorer(std::uint64_t seed, std::size_t dim) : mSeed(seed), mDim(dim) {
        // Affine map: bias column keeps constant images of different
        // brightness apart after normalization.
        RngStream rng = RngStream::derive(seed, "surrogate-map");
        mMap.resize(mDim * (kCells + 1));
        const double scale = 1.0 / std::sqrt(static_cast<double>(kCells));
        for (double& m : mMap) m = rng.normal() * scale;
    }

    ScorerKind kind() const override { return ScorerKind::surrogate; }
    std::size_t embedding_dim() const override { return mDim; }
    std::size_t preferred_batch() const override { return 1; }
    std::string describe() const override {
        std::ostringstream os;
        os << "surrogate(seed=" << mSeed << ", dim=" << mDim << ")";
        return os.str();
    }

    TextEmbedding embed_text(std::string_view prompt) override {
        RngStream rng = RngStream::derive(mSeed, "surrogate-text", fnv1a64(prompt));
        TextEmbedding e;
        e.source_text = std::string(prompt);
        e.vector.resize(mDim);
        double norm2 = 0.0;
        for (double& v : e.vector) {
            v = rng.normal();
            norm2 += v * v;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : e.vector) v *= inv;
        return e;
    }

    std::vector<std::vector<double>> embed_images(std::span<const Image> images) override {
        std::vector<std::vector<double>> out;
        out.reserve(images.size());
        for (const auto& img : images) {
            const Forward f = forward(img);
            std::vector<double> e(mDim);
            for (std::size_t k = 0; k < mDim; ++k) e[k] = f.z[k] / f.norm;
            out.push_back(std::move(e));
        }
        return out;
    }

    std::vector<double> score_views(std::span<const Image> views, std::span<const WeightedPrompt> prompts,
                                    std::span<Image> gradients) override {
        if (gradients.size() != views.size()) {
            throw ValidationError("surrogate scorer: one gradient buffer per view is required");
        }
        std::vector<double> out(views.size(), 0.0);
        std::vector<double> dz(mDim);
        std::array<double, kCells> dp{};
        for (std::size_t v = 0; v < views.size(); ++v) {
            const Image& view = views[v];
            const Forward f = forward(view);
            double& value = out[v];
            std::fill(dz.begin(), dz.end(), 0.0);
            for (const auto& p : prompts) {
                // cos = t.z/|z|; d cos/dz = (t - cos * z/|z|) / |z|
                double dot = 0.0;
                for (std::size_t k = 0; k < mDim; ++k) dot += p.embedding.vector[k] * f.z[k];
                const double cosine = dot / f.norm;
                value += p.weight * (1.0 - cosine);
                for (std::size_t k = 0; k < mDim; ++k) {
                    dz[k] -= p.weight * (p.embedding.vector[k] - cosine * f.z[k] / f.norm) / f.norm;
                }
            }
            dp.fill(0.0);
            for (std::size_t k = 0; k < mDim; ++k) {
                const double* row = &mMap[k * (kCells + 1)];
                for (int b = 0; b < kCells; ++b) dp[b] += row[b] * dz[k];
            }
            Image& gradient = gradients[v];
            gradient.reshape(view.height(), view.width());
            const Bins bins = make_bins(view);
            for (int y = 0; y < view.height(); ++y) {
                double* g = gradient.row(y);
                const int by = bins.row[static_cast<std::size_t>(y)];
                for (int x = 0; x < view.width(); ++x) {
                    const int b = by * kGrid + bins.col[static_cast<std::size_t>(x)];
                    const double d = dp[b] / bins.count[b];
                    for (int c = 0; c < 3; ++c) g[x * 3 + c] = kLuma[c] * d;
                }
            }
        }
        return out;
    }

    std::vector<double> score_values(std::span<const Image> views, std::span<const WeightedPrompt> prompts) override {
        std::vector<double> out(views.size(), 0.0);
        for (std::size_t v = 0; v < views.size(); ++v) {
            const Forward f = forward(views[v]);
            for (const auto& p : prompts) {
                double dot = 0.0;
                for (std::size_t k = 0; k < mDim; ++k) dot += p.embedding.vector[k] * f.z[k];
                out[v] += p.weight * (1.0 - dot / f.norm);
            }
        }
        return out;
    }

private:
    struct Bins {
        std::vector<int> row;
        std::vector<int> col;
        std::array<double, kCells> count{};
    };

    struct Forward {
        std::vector<double> z;
        double norm = 0.0;
    };

    static Bins make_bins(const Image& img) {
        Bins bins;
        bins.row.resize(static_cast<std::size_t>(img.height()));
        bins.col.resize(static_cast<std::size_t>(img.width()));
        for (int y = 0; y < img.height(); ++y) bins.row[static_cast<std::size_t>(y)] = y * kGrid / img.height();
        for (int x = 0; x < img.width(); ++x) bins.col[static_cast<std::size_t>(x)] = x * kGrid / img.width();
        std::array<int, kGrid> rows{};
        std::array<int, kGrid> cols{};
        for (int r : bins.row) ++rows[r];
        for (int c : bins.col) ++cols[c];
        for (int a = 0; a < kGrid; ++a)
            for (int b = 0; b < kGrid; ++b) bins.count[a * kGrid + b] = static_cast<double>(rows[a] * cols[b]);
        return bins;
    }

    Forward forward(const Image& img) const {
        if (img.height() < kGrid || img.width() < kGrid) {
            throw ValidationError("surrogate scorer: image must be at least 8x8");
        }
        const Bins bins = make_bins(img);
        std::array<double, kCells> pooled{};
        for (int y = 0; y < img.height(); ++y) {
            const double* p = img.row(y);
            const int by = bins.row[static_cast<std::size_t>(y)];
            for (int x = 0; x < img.width(); ++x) {
                pooled[by * kGrid + bins.col[static_cast<std::size_t>(x)]] +=
                    kLuma[0] * p[x * 3] + kLuma[1] * p[x * 3 + 1] + kLuma[2] * p[x * 3 + 2];
            }
        }
        for (int b = 0; b < kCells; ++b) pooled[b] /= bins.count[b];

        Forward f;
        f.z.resize(mDim);
        double norm2 = 0.0;
        for (std::size_t k = 0; k < mDim; ++k) {
            const double* row = &mMap[k * (kCells + 1)];
            double acc = row[kCells];
            for (int b = 0; b < kCells; ++b) acc += row[b] * pooled[b];
            f.z[k] = acc;
            norm2 += acc * acc;
        }
        f.norm = std::sqrt(norm2);
        if (!(f.norm > 1e-12)) {
            throw NumericError("surrogate scorer: degenerate image embedding");
        }
        return f;
    }

    std::uint64_t mSeed;
    std::size_t mDim;
    std::vector<double> mMap;  // mDim rows of (64 weights, bias)
};

}  // namespace

ScorerHandle make_surrogate_scorer(std::uint64_t seed, std::size_t embedding_dim) {
    if (embedding_dim < 8) {
        throw ValidationError("surrogate scorer: embedding_dim must be >= 8");
    }
    return std::make_unique<SurrogateScorer>(seed, embedding_dim);
}

}  // namespace t2v
