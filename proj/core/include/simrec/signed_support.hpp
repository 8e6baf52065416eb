#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace simrec {

struct SignedEntry {
    int index = 0;
    int sign = 0;  // -1 or +1

    friend auto operator<=>(const SignedEntry&, const SignedEntry&) = default;
};

/// Signed support of a vector: the set of (index, sign) pairs over its
/// nonzero coordinates. Entries are kept sorted by index, so set
/// equality is plain equality.
class SignedSupport {
  public:
    SignedSupport() = default;
    explicit SignedSupport(std::vector<SignedEntry> entries);

    /// Signed support of a dense vector; coordinates equal to 0.0 are excluded.
    static SignedSupport of(const Eigen::VectorXd& v);

    void insert(int index, int sign);

    const std::vector<SignedEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Flips every sign; used to compare against the sign(c0)-adjusted truth.
    SignedSupport negated() const;

    friend bool operator==(const SignedSupport&, const SignedSupport&) = default;

  private:
    std::vector<SignedEntry> entries_;  // sorted by index, indices unique
};

/// Order-independent FNV-1a style hash over the sorted entries.
std::uint64_t support_hash(const SignedSupport& support);

}  // namespace simrec
