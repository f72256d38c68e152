// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/miner_dynamics.hpp"

#include <algorithm>
#include <map>

#include "ethmerge/stats.hpp"

namespace ethmerge {

std::size_t unique_producer_count(std::span<const BlockHeader> headers) {
    std::vector<Address> producers;
    producers.reserve(headers.size());
    for (const auto& h : headers) {
        producers.push_back(h.producer);
    }
    std::sort(producers.begin(), producers.end());
    return static_cast<std::size_t>(std::unique(producers.begin(), producers.end()) - producers.begin());
}

std::vector<MinerProfile> producer_profiles(std::span<const BlockHeader> headers) {
    std::map<Address, std::vector<uint64_t>> blocks;
    for (const auto& h : headers) {
        blocks[h.producer].push_back(h.number);
    }
    std::vector<MinerProfile> out;
    out.reserve(blocks.size());
    for (auto& [producer, numbers] : blocks) {
        std::sort(numbers.begin(), numbers.end());
        numbers.erase(std::unique(numbers.begin(), numbers.end()), numbers.end());
        const auto count = static_cast<uint64_t>(numbers.size());
        out.push_back(MinerProfile{producer, count, std::move(numbers)});
    }
    return out;
}

CategoryReport categorize_counts(std::span<const uint64_t> counts, uint64_t window_size,
                                 const CategoryThresholds& thresholds) {
    CategoryReport report;
    report.window_size = window_size;
    report.thresholds = thresholds;
    for (const uint64_t c : counts) {
        if (c > thresholds.medium_max) {
            ++report.large;
        } else if (c >= thresholds.medium_min) {
            ++report.medium;
        } else {
            ++report.small;
        }
    }
    return report;
}

CategoryReport categorize_producers(std::span<const BlockHeader> headers, const CategoryThresholds& thresholds) {
    std::map<Address, uint64_t> counts;
    for (const auto& h : headers) {
        ++counts[h.producer];
    }
    std::vector<uint64_t> values;
    values.reserve(counts.size());
    for (const auto& [producer, c] : counts) {
        values.push_back(c);
    }
    return categorize_counts(values, headers.size(), thresholds);
}

std::vector<MinerProfile> top_profiles(std::vector<MinerProfile> profiles, std::size_t k) {
    if (profiles.size() < k) {
        fail(Errc::kInsufficientProducers,
             "need " + std::to_string(k) + " producers, found " + std::to_string(profiles.size()));
    }
    std::sort(profiles.begin(), profiles.end(), [](const MinerProfile& a, const MinerProfile& b) {
        if (a.blocks_produced != b.blocks_produced) {
            return a.blocks_produced > b.blocks_produced;
        }
        return a.producer < b.producer;
    });
    profiles.resize(k);
    return profiles;
}

std::vector<MinerProfile> top_producers(std::span<const BlockHeader> headers, std::size_t k) {
    return top_profiles(producer_profiles(headers), k);
}

std::vector<uint64_t> producer_block_sample(const MinerProfile& profile, std::size_t n, bool from_end) {
    const auto& b = profile.block_numbers;
    const std::size_t take = std::min(n, b.size());
    if (from_end) {
        return {b.end() - static_cast<std::ptrdiff_t>(take), b.end()};
    }
    return {b.begin(), b.begin() + static_cast<std::ptrdiff_t>(take)};
}

ProducerRandomness sample_randomness(std::span<const uint64_t> sample) {
    if (sample.size() < 2) {
        fail(Errc::kSampleTooShort, "randomness metrics need at least two blocks per sample");
    }
    ProducerRandomness r;
    r.sample_size = sample.size();
    std::size_t adjacent = 0;
    uint64_t run = 1;
    r.max_run_length = 1;
    for (std::size_t i = 1; i < sample.size(); ++i) {
        if (sample[i] <= sample[i - 1]) {
            fail(Errc::kInvalidConfig, "sample block numbers must be strictly increasing");
        }
        if (sample[i] == sample[i - 1] + 1) {
            ++adjacent;
            r.max_run_length = std::max(r.max_run_length, ++run);
        } else {
            run = 1;
        }
    }
    r.adjacency_rate = static_cast<double>(adjacent) / static_cast<double>(sample.size() - 1);
    r.normalized_span =
        static_cast<double>(sample.size()) / static_cast<double>(sample.back() - sample.front() + 1);
    return r;
}

RandomnessReport randomness_metrics(std::span<const std::vector<uint64_t>> samples) {
    RandomnessReport report;
    report.producers.reserve(samples.size());
    std::vector<double> adjacency;
    std::vector<double> runs;
    std::vector<double> spans;
    for (const auto& s : samples) {
        const ProducerRandomness r = sample_randomness(s);
        adjacency.push_back(r.adjacency_rate);
        runs.push_back(static_cast<double>(r.max_run_length));
        spans.push_back(r.normalized_span);
        report.producers.push_back(r);
    }
    report.mean_adjacency_rate = mean(adjacency);
    report.mean_max_run_length = mean(runs);
    report.mean_normalized_span = mean(spans);
    return report;
}

std::string_view to_string(Era era) noexcept { return era == Era::kPow ? "pow" : "pos"; }

WindowAnalysis analyze_window(std::span<const BlockHeader> headers, Era era, uint64_t window,
                              const MinerAnalysisConfig& config) {
    WindowAnalysis out;
    out.era = era;
    out.requested_size = window;
    const std::size_t take = std::min<std::size_t>(window, headers.size());
    const auto slice = era == Era::kPow ? headers.subspan(headers.size() - take, take) : headers.subspan(0, take);
    out.blocks = slice.size();
    if (!slice.empty()) {
        out.range = BlockRange{slice.front().number, slice.back().number};
    }
    auto profiles = producer_profiles(slice);
    out.unique_producers = profiles.size();
    std::vector<uint64_t> counts;
    counts.reserve(profiles.size());
    for (const auto& p : profiles) {
        counts.push_back(p.blocks_produced);
    }
    out.categories = categorize_counts(counts, slice.size(), config.thresholds);

    const auto top = top_profiles(std::move(profiles), std::min(config.top_k, out.unique_producers));
    std::vector<std::vector<uint64_t>> samples;
    std::vector<Address> sampled;
    for (const auto& p : top) {
        out.top.push_back(TopEntry{p.producer, p.blocks_produced});
        auto sample = producer_block_sample(p, config.sample_size, era == Era::kPow);
        if (sample.size() >= 2) {
            samples.push_back(std::move(sample));
            sampled.push_back(p.producer);
        }
    }
    if (!samples.empty()) {
        out.randomness = randomness_metrics(samples);
        for (std::size_t i = 0; i < sampled.size(); ++i) {
            out.randomness.producers[i].producer = sampled[i];
        }
    }
    return out;
}

}  // namespace ethmerge
