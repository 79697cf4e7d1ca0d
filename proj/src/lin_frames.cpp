#include "linmm/lin_frames.hpp"

namespace linmm {

FrameId::FrameId(int id) {
  if (id < 0 || id > 63) throw std::domain_error("frame id out of 6-bit range: " + std::to_string(id));
  id_ = static_cast<std::uint8_t>(id);
}

std::uint8_t compute_pid(FrameId id) {
  const unsigned v = id.value();
  auto bit = [v](int i) { return (v >> i) & 1u; };
  const unsigned p0 = bit(0) ^ bit(1) ^ bit(2) ^ bit(4);
  const unsigned p1 = (~(bit(1) ^ bit(3) ^ bit(4) ^ bit(5))) & 1u;
  return static_cast<std::uint8_t>((p1 << 7) | (p0 << 6) | v);
}

std::uint8_t compute_pid(int id) { return compute_pid(FrameId(id)); }

bool pid_parity_ok(std::uint8_t pid) { return compute_pid(id_of_pid(pid)) == pid; }

ChecksumModel default_checksum_model(int id) {
  return (id == 0x3C || id == 0x3D) ? ChecksumModel::classic : ChecksumModel::enhanced;
}

std::uint8_t checksum(std::span<const std::uint8_t> data, ChecksumModel model,
                      std::uint8_t pid) {
  if (data.empty() || data.size() > 8)
    throw std::domain_error("checksum needs 1..8 data bytes");
  unsigned sum = model == ChecksumModel::enhanced ? pid : 0u;
  for (auto b : data) {
    sum += b;
    if (sum > 0xFF) sum -= 0xFF;  // add carry back in
  }
  return static_cast<std::uint8_t>(~sum & 0xFF);
}

ResponseFrame make_response(std::vector<std::uint8_t> data, ChecksumModel model,
                            std::uint8_t pid) {
  ResponseFrame f;
  f.checksum = checksum(data, model, pid);
  f.data = std::move(data);
  f.checksum_model = model;
  return f;
}

void append_byte_cells(Bitstream& bits, std::uint8_t byte) {
  bits.push_back(0);
  for (int i = 0; i < 8; ++i) bits.push_back((byte >> i) & 1u);
  bits.push_back(1);
}

int response_cells(int data_len, int inter_byte_space) {
  return kCellsPerByte * (data_len + 1) + inter_byte_space * data_len;
}

Bitstream serialize_response(const ResponseFrame& frame, int inter_byte_space) {
  if (frame.data.empty() || frame.data.size() > 8)
    throw std::domain_error("response needs 1..8 data bytes");
  if (inter_byte_space < 0) throw std::domain_error("negative inter-byte space");
  Bitstream bits;
  bits.reserve(static_cast<std::size_t>(response_cells(static_cast<int>(frame.data.size()), inter_byte_space)));
  for (auto b : frame.data) {
    append_byte_cells(bits, b);
    bits.insert(bits.end(), static_cast<std::size_t>(inter_byte_space), 1);
  }
  append_byte_cells(bits, frame.checksum);
  return bits;
}

int header_cells(const HeaderFrame& h) {
  return h.break_bits + h.break_delimiter_bits + 2 * kCellsPerByte;
}

Bitstream serialize_header(const HeaderFrame& header) {
  if (header.break_bits < kMinBreakBits)
    throw std::domain_error("break field shorter than 13 bit periods");
  if (header.break_delimiter_bits < 1)
    throw std::domain_error("break delimiter must be at least one bit period");
  Bitstream bits(static_cast<std::size_t>(header.break_bits), 0);
  bits.insert(bits.end(), static_cast<std::size_t>(header.break_delimiter_bits), 1);
  append_byte_cells(bits, kSyncByte);
  append_byte_cells(bits, header.pid);
  return bits;
}

std::optional<std::uint8_t> decode_byte_cells(std::span<const std::uint8_t> cells) {
  if (cells.size() < kCellsPerByte || cells[0] != 0 || cells[9] != 1) return std::nullopt;
  std::uint8_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint8_t>((cells[1 + i] & 1u) << i);
  return v;
}

ParseResult parse_response(std::span<const std::uint8_t> bits, int expected_len,
                           ChecksumModel model, std::uint8_t pid, int inter_byte_space) {
  ParseResult r;
  if (expected_len < 1 || expected_len > 8) throw std::domain_error("expected_len must be 1..8");
  if (static_cast<int>(bits.size()) < response_cells(expected_len, inter_byte_space)) {
    r.status = ParseStatus::truncated;
    return r;
  }
  std::size_t pos = 0;
  for (int i = 0; i <= expected_len; ++i) {
    auto byte = decode_byte_cells(bits.subspan(pos, kCellsPerByte));
    if (!byte) {
      r.status = ParseStatus::framing_error;
      r.byte_index = i;
      return r;
    }
    r.raw.push_back(*byte);
    pos += kCellsPerByte + (i < expected_len ? static_cast<std::size_t>(inter_byte_space) : 0);
  }
  std::vector<std::uint8_t> data(r.raw.begin(), r.raw.begin() + expected_len);
  const std::uint8_t received = r.raw.back();
  if (checksum(data, model, pid) != received) {
    r.status = ParseStatus::checksum_error;
    r.byte_index = expected_len;
    return r;
  }
  r.status = ParseStatus::ok;
  r.frame = ResponseFrame{std::move(data), received, model};
  return r;
}

std::string to_string(ChecksumModel m) { return m == ChecksumModel::classic ? "classic" : "enhanced"; }

ChecksumModel checksum_model_from_string(const std::string& s) {
  if (s == "classic") return ChecksumModel::classic;
  if (s == "enhanced") return ChecksumModel::enhanced;
  throw std::invalid_argument("unknown checksum model: " + s);
}

std::string to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::ok: return "pass";
    case ParseStatus::framing_error: return "framing_error";
    case ParseStatus::checksum_error: return "checksum_error";
    case ParseStatus::truncated: return "truncated";
  }
  return "unknown";
}

}  // namespace linmm
