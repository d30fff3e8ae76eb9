#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavescrub/frame.hpp"

namespace wavescrub {

// ---------------------------------------------------------------------------
// PPM (P6, maxval 255). Samples are scaled by 1/255 on read; on write they are
// clamped to [0,1] and rounded half-up. Gray frames are written as R=G=B,
// YCbCr frames are converted to RGB first.

Frame read_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_ppm(const Frame& f);

/// Reads one image; std::nullopt on clean end of stream.
std::optional<Frame> read_ppm(std::istream& in);
void write_ppm(std::ostream& out, const Frame& f);

// ---------------------------------------------------------------------------
// YUV4MPEG2, 8-bit. Studio range (Y 16..235, Cb/Cr 16..240) maps to [0,1].
// C420 chroma is replicated on read and box-averaged on write.

enum class ChromaFormat { C420, C444 };

struct VideoStreamHeader {
    int width = 0;
    int height = 0;
    int fps_num = 25;
    int fps_den = 1;
    ChromaFormat chroma = ChromaFormat::C420;
    /// Tokens retained verbatim (without their tag letter); empty when absent.
    std::string chroma_token;
    std::string interlace;
    std::string aspect;
    std::vector<std::string> extensions;

    std::string serialize() const;
    static VideoStreamHeader parse(const std::string& line);
};

/// Pull-based frame source; every yielded frame matches size().
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual std::optional<Frame> next() = 0;
};

class FrameSink {
public:
    virtual ~FrameSink() = default;
    virtual void write(const Frame& f) = 0;
    virtual void finish() {}
};

class Y4mReader final : public FrameSource {
public:
    explicit Y4mReader(std::istream& in);

    const VideoStreamHeader& header() const noexcept { return header_; }
    std::optional<Frame> next() override;

private:
    std::istream& in_;
    VideoStreamHeader header_;
    std::int64_t index_ = 0;
    std::vector<std::uint8_t> buffer_;
};

class Y4mWriter final : public FrameSink {
public:
    Y4mWriter(std::ostream& out, VideoStreamHeader header);

    void write(const Frame& f) override;
    void finish() override;

private:
    std::ostream& out_;
    VideoStreamHeader header_;
    std::vector<std::uint8_t> buffer_;
};

/// Concatenated P6 images in one stream, or every *.ppm in a directory in
/// lexicographic order.
class PpmSequenceReader final : public FrameSource {
public:
    explicit PpmSequenceReader(std::istream& in);
    explicit PpmSequenceReader(std::vector<std::filesystem::path> files);

    std::optional<Frame> next() override;

private:
    std::istream* in_ = nullptr;
    std::vector<std::filesystem::path> files_;
    std::size_t file_index_ = 0;
    std::optional<Size> size_;
};

/// Concatenates into a stream, or writes frame_00000.ppm, ... into a directory.
class PpmSequenceWriter final : public FrameSink {
public:
    explicit PpmSequenceWriter(std::ostream& out);
    explicit PpmSequenceWriter(std::filesystem::path directory);

    void write(const Frame& f) override;
    void finish() override;

private:
    std::ostream* out_ = nullptr;
    std::filesystem::path directory_;
    std::size_t count_ = 0;
};

std::vector<std::filesystem::path> list_ppm_files(const std::filesystem::path& directory);

/// Unit-scale sample to byte: clamp to [0,1], scale by 255, round half up.
std::uint8_t quantize_full_range(double v) noexcept;

}  // namespace wavescrub
