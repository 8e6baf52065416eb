#include "simrec/signed_support.hpp"

#include <algorithm>
#include <stdexcept>

namespace simrec {

SignedSupport::SignedSupport(std::vector<SignedEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    for (std::size_t i = 0; i + 1 < entries_.size(); ++i) {
        if (entries_[i].index == entries_[i + 1].index) {
            throw std::invalid_argument("SignedSupport: duplicate index");
        }
    }
    for (const auto& e : entries_) {
        if (e.sign != 1 && e.sign != -1) {
            throw std::invalid_argument("SignedSupport: sign must be +1 or -1");
        }
    }
}

SignedSupport SignedSupport::of(const Eigen::VectorXd& v) {
    SignedSupport support;
    for (int j = 0; j < v.size(); ++j) {
        if (v[j] != 0.0) {
            support.entries_.push_back({j, v[j] > 0.0 ? 1 : -1});
        }
    }
    return support;
}

void SignedSupport::insert(int index, int sign) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("SignedSupport: sign must be +1 or -1");
    }
    SignedEntry entry{index, sign};
    auto pos = std::lower_bound(entries_.begin(), entries_.end(), entry,
                                [](const SignedEntry& a, const SignedEntry& b) { return a.index < b.index; });
    if (pos != entries_.end() && pos->index == index) {
        throw std::invalid_argument("SignedSupport: duplicate index");
    }
    entries_.insert(pos, entry);
}

SignedSupport SignedSupport::negated() const {
    SignedSupport flipped(*this);
    for (auto& e : flipped.entries_) {
        e.sign = -e.sign;
    }
    return flipped;
}

std::uint64_t support_hash(const SignedSupport& support) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    for (const auto& e : support.entries()) {
        mix(static_cast<std::uint64_t>(e.index));
        mix(static_cast<std::uint64_t>(e.sign == 1 ? 1 : 2));
    }
    return h;
}

}  // namespace simrec
