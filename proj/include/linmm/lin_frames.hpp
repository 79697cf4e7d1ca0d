#pragma once

// LIN 2.x data-link codec: protected identifiers, checksums and UART 8N1
// bit-cell serialization of header and response frames.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace linmm {

/// Logic level of one LIN bit cell. Dominant (0) wins on the wired-AND bus.
enum class Level : std::uint8_t { dominant = 0, recessive = 1 };

using Bitstream = std::vector<std::uint8_t>;  // one 0/1 entry per bit period

enum class ChecksumModel { classic, enhanced };

inline constexpr int kMinBreakBits = 13;
inline constexpr std::uint8_t kSyncByte = 0x55;
inline constexpr int kCellsPerByte = 10;

class FrameId {
 public:
  explicit FrameId(int id);
  [[nodiscard]] std::uint8_t value() const { return id_; }
  friend bool operator==(FrameId, FrameId) = default;

 private:
  std::uint8_t id_;
};

struct HeaderFrame {
  int break_bits = kMinBreakBits;
  int break_delimiter_bits = 1;
  std::uint8_t pid = 0x80;
};

struct ResponseFrame {
  std::vector<std::uint8_t> data;
  std::uint8_t checksum = 0;
  ChecksumModel checksum_model = ChecksumModel::enhanced;

  friend bool operator==(const ResponseFrame&, const ResponseFrame&) = default;
};

std::uint8_t compute_pid(FrameId id);
std::uint8_t compute_pid(int id);
/// Low 6 bits of a protected identifier.
inline int id_of_pid(std::uint8_t pid) { return pid & 0x3F; }
bool pid_parity_ok(std::uint8_t pid);

/// Classic for the diagnostic ids 0x3C/0x3D, enhanced otherwise.
ChecksumModel default_checksum_model(int id);

std::uint8_t checksum(std::span<const std::uint8_t> data, ChecksumModel model,
                      std::uint8_t pid);

/// Builds a response whose checksum matches `data` under `model`.
ResponseFrame make_response(std::vector<std::uint8_t> data, ChecksumModel model,
                            std::uint8_t pid);

void append_byte_cells(Bitstream& bits, std::uint8_t byte);

Bitstream serialize_response(const ResponseFrame& frame, int inter_byte_space = 0);
Bitstream serialize_header(const HeaderFrame& header);

/// Number of cells occupied by an n-byte response (n data bytes + checksum).
int response_cells(int data_len, int inter_byte_space = 0);
int header_cells(const HeaderFrame& header);

enum class ParseStatus { ok, framing_error, checksum_error, truncated };

struct ParseResult {
  ParseStatus status = ParseStatus::truncated;
  /// Byte index of the offending byte; data_len means the checksum byte.
  int byte_index = -1;
  std::optional<ResponseFrame> frame;
  /// Bytes as received, filled whenever framing was intact.
  std::vector<std::uint8_t> raw;

  [[nodiscard]] bool ok() const { return status == ParseStatus::ok; }
};

ParseResult parse_response(std::span<const std::uint8_t> bits, int expected_len,
                           ChecksumModel model, std::uint8_t pid,
                           int inter_byte_space = 0);

/// Decodes one 10-cell UART byte; nullopt on a framing violation.
std::optional<std::uint8_t> decode_byte_cells(std::span<const std::uint8_t> cells);

std::string to_string(ChecksumModel m);
ChecksumModel checksum_model_from_string(const std::string& s);
std::string to_string(ParseStatus s);

}  // namespace linmm
