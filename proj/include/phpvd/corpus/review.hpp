// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "phpvd/corpus/sample.hpp"

namespace phpvd::corpus {

/// ceil(fraction * #Unsafe) Unsafe samples picked with the seeded generator,
/// in id order. Labels are never modified.
std::vector<Sample> select_for_review(const std::vector<Sample>& samples, double fraction, std::uint64_t seed);

/// CSV sheet "id,label,origin,verdict" with an empty verdict column for a
/// human to fill with "confirmed" or "rejected".
std::string render_review_sheet(const std::vector<Sample>& selected);

struct ReviewTally {
    std::size_t confirmed = 0;
    std::size_t rejected = 0;
    std::size_t pending = 0;
    std::vector<std::string> rejected_ids;

    bool operator==(const ReviewTally&) const = default;
};

/// Counts verdicts in a filled sheet. Throws FormatError on unknown verdicts.
ReviewTally tally_review(std::string_view sheet);

/// Splits one CSV record; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_record(std::string_view line);

}  // namespace phpvd::corpus
