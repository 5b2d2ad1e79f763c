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
#include "ssdsim/mapping.hpp"

namespace ssdsim {

void ArrayLayout::validate() const {
  if (num_ssds == 0) throw ConfigError("layout: num_ssds must be > 0");
  if (page_size == 0) throw ConfigError("layout: page_size must be > 0");
  if (stripe_unit == 0 || stripe_unit % page_size != 0)
    throw ConfigError("layout: stripe_unit must be a multiple of page_size");
}

std::uint32_t ssd_of_page(const ArrayLayout& layout, std::uint64_t page) {
  return static_cast<std::uint32_t>((page / layout.unit_pages()) %
                                    layout.num_ssds);
}

std::uint64_t device_page_of(const ArrayLayout& layout, std::uint64_t page) {
  const std::uint64_t up = layout.unit_pages();
  const std::uint64_t stripe_row = page / (up * layout.num_ssds);
  return stripe_row * up + page % up;
}

std::vector<SubRequest> split(const ArrayLayout& layout, std::uint64_t offset,
                              std::uint64_t length) {
  if (length == 0) throw ConfigError("split: zero-length request");
  const std::uint64_t cap_bytes =
      layout.total_pages * static_cast<std::uint64_t>(layout.page_size);
  if (offset + length > cap_bytes)
    throw ConfigError("split: request [" + std::to_string(offset) + ", " +
                      std::to_string(offset + length) +
                      ") exceeds logical capacity " + std::to_string(cap_bytes));

  std::vector<SubRequest> out;
  const std::uint64_t ps = layout.page_size;
  std::uint64_t pos = offset;
  const std::uint64_t end = offset + length;
  while (pos < end) {
    const std::uint64_t page = pos / ps;
    const std::uint32_t in_page = static_cast<std::uint32_t>(pos % ps);
    const std::uint32_t len =
        static_cast<std::uint32_t>(std::min<std::uint64_t>(ps - in_page, end - pos));
    SubRequest sub;
    sub.page = page;
    sub.ssd = ssd_of_page(layout, page);
    sub.device_page = device_page_of(layout, page);
    sub.offset = in_page;
    sub.length = len;
    sub.partial = len < ps;
    out.push_back(sub);
    pos += len;
  }
  return out;
}

}  // namespace ssdsim
