/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "ssdsim/common.hpp"

namespace ssdsim {

/// RAID-0 page-granular striping across the array.
struct ArrayLayout {
  std::uint32_t num_ssds = 1;
  std::uint32_t page_size = 4096;
  std::uint32_t stripe_unit = 4096;  // must be a multiple of page_size
  std::uint64_t total_pages = 0;     // array-wide logical capacity in pages

  std::uint32_t unit_pages() const { return stripe_unit / page_size; }
  void validate() const;
};

/// One whole-page piece of a split application request.
struct SubRequest {
  std::uint64_t page = 0;         // array-wide logical page id
  std::uint32_t ssd = 0;          // target device
  std::uint64_t device_page = 0;  // logical page id on the target device
  std::uint32_t offset = 0;       // byte offset inside the page
  std::uint32_t length = 0;       // bytes covered inside the page
  bool partial = false;           // needs read-update-write
};

std::uint32_t ssd_of_page(const ArrayLayout& layout, std::uint64_t page);
std::uint64_t device_page_of(const ArrayLayout& layout, std::uint64_t page);

/// Splits a byte-range request into per-SSD whole-page sub-requests that tile
/// the range exactly. Throws ConfigError if the range is out of bounds.
std::vector<SubRequest> split(const ArrayLayout& layout, std::uint64_t offset,
                              std::uint64_t length);

}  // namespace ssdsim
