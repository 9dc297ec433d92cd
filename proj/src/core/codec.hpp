#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/image.hpp"

namespace iqn {

enum class CodecKind { Surrogate, External };

struct CodecConfig {
  int qp = 27;  // 0..63
  CodecKind codec = CodecKind::Surrogate;
  // External only: argv with {in}, {out}, {qp} placeholders, run without a shell.
  std::vector<std::string> externalCommand;

  void validate() const;
};

struct CodecResult {
  PlanarImage reconstructed;
  uint64_t bits = 0;
};

// Quantization step 2^((qp-4)/6), the HEVC/VVC convention.
double qstep(int qp);

// Exp-Golomb-style length proxy for one quantized level: 2*floor(log2|q|)+3
// bits for q != 0, none for zero.
uint32_t coeff_cost_bits(int64_t q);

// Quantizes one DCT block in place at the given step (round half away from
// zero), returning the cost in bits including 4 end-of-block bits. `coeffs`
// holds the dequantized values on return.
uint32_t quantize_block(double coeffs[64], double step);

// Flat-quantization intra codec over 8x8 DCT blocks of every plane. Planes
// are padded to multiples of 8 by edge replication and cropped back; the bit
// count is the code-length proxy summed over all blocks of all planes.
CodecResult surrogate_encode(const PlanarImage& img, const CodecConfig& cfg);

// Runs an external encode+reconstruct command. The image is handed over as
// Y4M ({in}), the reconstruction is read back from {out} (.y4m or .pgm), and
// bits come from a `bits=N` line on the command's output, falling back to
// 8 * filesize({out}).
CodecResult external_encode(const PlanarImage& img, const CodecConfig& cfg);

CodecResult encode(const PlanarImage& img, const CodecConfig& cfg);

}  // namespace iqn
