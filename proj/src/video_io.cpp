#include "wavescrub/video_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "wavescrub/error.hpp"

namespace wavescrub {

namespace {

constexpr std::size_t kMaxPixels = std::size_t{1} << 28;
constexpr std::size_t kMaxHeaderLine = 4096;

bool is_space(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

void skip_space_and_comments(std::istream& in) {
    for (;;) {
        const int c = in.peek();
        if (c == std::char_traits<char>::eof()) return;
        if (is_space(c)) {
            in.get();
        } else if (c == '#') {
            int d;
            do {
                d = in.get();
            } while (d != std::char_traits<char>::eof() && d != '\n' && d != '\r');
        } else {
            return;
        }
    }
}

int read_header_number(std::istream& in, const char* what) {
    skip_space_and_comments(in);
    std::int64_t value = 0;
    int digits = 0;
    while (std::isdigit(in.peek())) {
        value = value * 10 + (in.get() - '0');
        if (++digits > 9) throw Error(ErrorCode::MalformedHeader, std::string("PPM ") + what + " too large");
    }
    if (digits == 0) {
        if (in.peek() == std::char_traits<char>::eof()) {
            throw Error(ErrorCode::TruncatedPayload, std::string("PPM header ends before ") + what);
        }
        throw Error(ErrorCode::MalformedHeader, std::string("PPM ") + what + " is not a number");
    }
    const int next = in.peek();
    if (next == std::char_traits<char>::eof()) throw Error(ErrorCode::TruncatedPayload, "PPM header truncated");
    if (!is_space(next) && next != '#') {
        throw Error(ErrorCode::MalformedHeader, std::string("PPM ") + what + " followed by garbage");
    }
    return static_cast<int>(value);
}

void read_exact(std::istream& in, std::vector<std::uint8_t>& buf, std::size_t n, ErrorCode code,
                const std::string& what) {
    buf.resize(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw Error(code, what + ": expected " + std::to_string(n) + " bytes, got " + std::to_string(in.gcount()));
    }
}

Frame as_rgb(const Frame& f) {
    switch (f.colorspace()) {
    case Colorspace::RGB: return f;
    case Colorspace::YCbCr: return ycbcr_to_rgb(f);
    case Colorspace::Gray: return Frame(Colorspace::RGB, {f.channel(0), f.channel(0), f.channel(0)});
    }
    return f;
}

Frame as_ycbcr(const Frame& f) {
    switch (f.colorspace()) {
    case Colorspace::YCbCr: return f;
    case Colorspace::RGB: return rgb_to_ycbcr(f);
    case Colorspace::Gray: {
        const Plane neutral(f.width(), f.height(), 0.5);
        return Frame(Colorspace::YCbCr, {f.channel(0), neutral, neutral});
    }
    }
    return f;
}

// Studio range: byte = unit * span + 16. Clamping happens in the byte domain
// so that out-of-range codes (0..15, 236..255) survive a read/write cycle.
constexpr double kLumaSpan = 219.0;
constexpr double kChromaSpan = 224.0;

double from_studio(std::uint8_t v, double span) { return (static_cast<double>(v) - 16.0) / span; }

std::uint8_t to_studio(double v, double span) {
    const double code = std::floor(v * span + 16.0 + 0.5);
    if (!(code >= 0.0)) return 0;
    return static_cast<std::uint8_t>(std::min(code, 255.0));
}

int parse_positive(const std::string& s, const char* what) {
    if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw Error(ErrorCode::MalformedHeader, std::string("Y4M ") + what + " '" + s + "' is not a positive integer");
    }
    const int v = std::stoi(s);
    if (v < 1) throw Error(ErrorCode::MalformedHeader, std::string("Y4M ") + what + " must be >= 1");
    return v;
}

std::string read_line(std::istream& in, ErrorCode truncated, const std::string& what) {
    std::string line;
    for (;;) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) throw Error(truncated, what + " not terminated by newline");
        if (c == '\n') return line;
        line.push_back(static_cast<char>(c));
        if (line.size() > kMaxHeaderLine) throw Error(ErrorCode::MalformedHeader, what + " too long");
    }
}

}  // namespace

std::uint8_t quantize_full_range(double v) noexcept {
    const double c = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

std::optional<Frame> read_ppm(std::istream& in) {
    if (in.peek() == std::char_traits<char>::eof()) return std::nullopt;
    const int m0 = in.get();
    const int m1 = in.get();
    if (m0 != 'P' || m1 != '6') throw Error(ErrorCode::BadMagic, "not a P6 PPM");
    const int after = in.peek();
    if (after != std::char_traits<char>::eof() && !is_space(after) && after != '#') {
        throw Error(ErrorCode::BadMagic, "not a P6 PPM");
    }
    const int width = read_header_number(in, "width");
    const int height = read_header_number(in, "height");
    const int maxval = read_header_number(in, "maxval");
    if (width < 1 || height < 1) throw Error(ErrorCode::MalformedHeader, "PPM dimensions must be >= 1");
    if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) > kMaxPixels) {
        throw Error(ErrorCode::MalformedHeader, "PPM dimensions too large");
    }
    if (maxval < 1 || maxval > 65535) throw Error(ErrorCode::MalformedHeader, "PPM maxval outside 1..65535");
    if (maxval != 255) throw Error(ErrorCode::UnsupportedMaxval, "only maxval 255 is supported, got " + std::to_string(maxval));
    if (!is_space(in.get())) throw Error(ErrorCode::MalformedHeader, "PPM maxval must be followed by one whitespace byte");

    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> payload;
    read_exact(in, payload, pixels * 3, ErrorCode::TruncatedPayload, "PPM payload");
    Frame f(width, height, Colorspace::RGB);
    for (int c = 0; c < 3; ++c) {
        auto dst = f.channel(c).samples();
        for (std::size_t i = 0; i < pixels; ++i) dst[i] = payload[i * 3 + static_cast<std::size_t>(c)] / 255.0;
    }
    return f;
}

Frame read_ppm(std::span<const std::uint8_t> bytes) {
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    auto f = read_ppm(in);
    if (!f) throw Error(ErrorCode::TruncatedPayload, "empty PPM input");
    return std::move(*f);
}

void write_ppm(std::ostream& out, const Frame& f) {
    const auto bytes = write_ppm(f);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> write_ppm(const Frame& f) {
    const Frame rgb = as_rgb(f);
    const std::string header = "P6\n" + std::to_string(rgb.width()) + " " + std::to_string(rgb.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const std::size_t pixels = rgb.channel(0).sample_count();
    out.reserve(out.size() + pixels * 3);
    auto r = rgb.channel(0).samples();
    auto g = rgb.channel(1).samples();
    auto b = rgb.channel(2).samples();
    for (std::size_t i = 0; i < pixels; ++i) {
        out.push_back(quantize_full_range(r[i]));
        out.push_back(quantize_full_range(g[i]));
        out.push_back(quantize_full_range(b[i]));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string VideoStreamHeader::serialize() const {
    std::string s = "YUV4MPEG2 W" + std::to_string(width) + " H" + std::to_string(height) + " F" +
                    std::to_string(fps_num) + ":" + std::to_string(fps_den);
    if (!interlace.empty()) s += " I" + interlace;
    if (!aspect.empty()) s += " A" + aspect;
    if (!chroma_token.empty()) {
        s += " C" + chroma_token;
    } else if (chroma == ChromaFormat::C444) {
        s += " C444";
    }
    for (const auto& x : extensions) s += " X" + x;
    return s + "\n";
}

VideoStreamHeader VideoStreamHeader::parse(const std::string& line) {
    static const std::string kSignature = "YUV4MPEG2";
    if (line.compare(0, kSignature.size(), kSignature) != 0 ||
        (line.size() > kSignature.size() && line[kSignature.size()] != ' ')) {
        throw Error(ErrorCode::BadSignature, "stream does not start with YUV4MPEG2");
    }
    VideoStreamHeader h;
    bool have_w = false;
    bool have_h = false;
    bool have_f = false;
    std::istringstream tokens(line.substr(kSignature.size()));
    std::string tok;
    while (tokens >> tok) {
        const char tag = tok[0];
        const std::string value = tok.substr(1);
        switch (tag) {
        case 'W': h.width = parse_positive(value, "width"); have_w = true; break;
        case 'H': h.height = parse_positive(value, "height"); have_h = true; break;
        case 'F': {
            const auto colon = value.find(':');
            if (colon == std::string::npos) throw Error(ErrorCode::MalformedHeader, "Y4M frame rate needs n:d");
            h.fps_num = parse_positive(value.substr(0, colon), "frame rate numerator");
            h.fps_den = parse_positive(value.substr(colon + 1), "frame rate denominator");
            have_f = true;
            break;
        }
        case 'I': h.interlace = value; break;
        case 'A': h.aspect = value; break;
        case 'C':
            if (value == "420jpeg" || value == "420paldv" || value == "420mpeg2" || value == "420") {
                h.chroma = ChromaFormat::C420;
            } else if (value == "444") {
                h.chroma = ChromaFormat::C444;
            } else {
                throw Error(ErrorCode::UnsupportedFormat, "Y4M chroma '" + value + "' not supported (420*, 444)");
            }
            h.chroma_token = value;
            break;
        case 'X': h.extensions.push_back(value); break;
        default: throw Error(ErrorCode::MalformedHeader, "unknown Y4M header parameter '" + tok + "'");
        }
    }
    if (!have_w) throw Error(ErrorCode::HeaderParamMissing, "Y4M header lacks W", 'W');
    if (!have_h) throw Error(ErrorCode::HeaderParamMissing, "Y4M header lacks H", 'H');
    if (!have_f) throw Error(ErrorCode::HeaderParamMissing, "Y4M header lacks F", 'F');
    if (static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height) > kMaxPixels) {
        throw Error(ErrorCode::MalformedHeader, "Y4M dimensions too large");
    }
    if (h.chroma == ChromaFormat::C420 && (h.width % 2 != 0 || h.height % 2 != 0)) {
        throw Error(ErrorCode::UnsupportedFormat, "4:2:0 streams need even dimensions");
    }
    return h;
}

Y4mReader::Y4mReader(std::istream& in) : in_(in) {
    char sig[10];
    in_.read(sig, 10);
    if (in_.gcount() < 10 || std::string(sig, 10) != "YUV4MPEG2 ") {
        throw Error(ErrorCode::BadSignature, "stream does not start with 'YUV4MPEG2 '");
    }
    header_ = VideoStreamHeader::parse("YUV4MPEG2 " + read_line(in_, ErrorCode::MalformedHeader, "Y4M header"));
}

std::optional<Frame> Y4mReader::next() {
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
    char marker[5];
    in_.read(marker, 5);
    if (in_.gcount() != 5 || std::string(marker, 5) != "FRAME") {
        throw Error(ErrorCode::FrameMarkerMissing, "frame " + std::to_string(index_) + " lacks FRAME marker", index_);
    }
    const int sep = in_.get();
    if (sep == ' ') {
        read_line(in_, ErrorCode::ShortFrame, "FRAME parameters");
    } else if (sep != '\n') {
        throw Error(ErrorCode::FrameMarkerMissing, "frame " + std::to_string(index_) + " has malformed FRAME line",
                    index_);
    }

    const int w = header_.width;
    const int h = header_.height;
    const bool sub = header_.chroma == ChromaFormat::C420;
    const int cw = sub ? w / 2 : w;
    const int ch = sub ? h / 2 : h;
    const std::size_t luma = static_cast<std::size_t>(w) * h;
    const std::size_t chroma = static_cast<std::size_t>(cw) * ch;
    read_exact(in_, buffer_, luma + 2 * chroma, ErrorCode::ShortFrame, "frame " + std::to_string(index_));

    Frame f(w, h, Colorspace::YCbCr);
    auto y = f.channel(0).samples();
    for (std::size_t i = 0; i < luma; ++i) y[i] = from_studio(buffer_[i], kLumaSpan);
    for (int c = 0; c < 2; ++c) {
        const std::uint8_t* src = buffer_.data() + luma + static_cast<std::size_t>(c) * chroma;
        Plane& dst = f.channel(1 + c);
        for (int yy = 0; yy < h; ++yy) {
            const int sy = sub ? yy / 2 : yy;
            for (int xx = 0; xx < w; ++xx) {
                const int sx = sub ? xx / 2 : xx;
                dst.at(xx, yy) = from_studio(src[static_cast<std::size_t>(sy) * cw + sx], kChromaSpan);
            }
        }
    }
    ++index_;
    return f;
}

Y4mWriter::Y4mWriter(std::ostream& out, VideoStreamHeader header) : out_(out), header_(std::move(header)) {
    if (header_.width < 1 || header_.height < 1) throw Error(ErrorCode::MalformedHeader, "Y4M dimensions must be >= 1");
    if (header_.chroma == ChromaFormat::C420 && (header_.width % 2 || header_.height % 2)) {
        throw Error(ErrorCode::UnsupportedFormat, "4:2:0 streams need even dimensions");
    }
    const auto text = header_.serialize();
    out_.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void Y4mWriter::write(const Frame& frame) {
    if (frame.width() != header_.width || frame.height() != header_.height) {
        throw Error(ErrorCode::DimMismatch, "frame size differs from stream header");
    }
    const Frame f = as_ycbcr(frame);
    const int w = f.width();
    const int h = f.height();
    const bool sub = header_.chroma == ChromaFormat::C420;
    const int cw = sub ? w / 2 : w;
    const int ch = sub ? h / 2 : h;
    buffer_.clear();
    for (double v : f.channel(0).samples()) buffer_.push_back(to_studio(v, kLumaSpan));
    for (int c = 1; c <= 2; ++c) {
        const Plane& p = f.channel(c);
        for (int yy = 0; yy < ch; ++yy) {
            for (int xx = 0; xx < cw; ++xx) {
                double v;
                if (sub) {
                    v = (p.at(2 * xx, 2 * yy) + p.at(2 * xx + 1, 2 * yy) + p.at(2 * xx, 2 * yy + 1) +
                         p.at(2 * xx + 1, 2 * yy + 1)) / 4.0;
                } else {
                    v = p.at(xx, yy);
                }
                buffer_.push_back(to_studio(v, kChromaSpan));
            }
        }
    }
    out_.write("FRAME\n", 6);
    out_.write(reinterpret_cast<const char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
    if (!out_) throw Error(ErrorCode::IoError, "failed writing Y4M frame");
}

void Y4mWriter::finish() { out_.flush(); }

// ---------------------------------------------------------------------------

std::vector<std::filesystem::path> list_ppm_files(const std::filesystem::path& directory) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(directory, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".ppm") files.push_back(entry.path());
    }
    if (ec) throw Error(ErrorCode::IoError, "cannot list " + directory.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());
    return files;
}

PpmSequenceReader::PpmSequenceReader(std::istream& in) : in_(&in) {}

PpmSequenceReader::PpmSequenceReader(std::vector<std::filesystem::path> files) : files_(std::move(files)) {}

std::optional<Frame> PpmSequenceReader::next() {
    std::optional<Frame> f;
    if (in_) {
        f = read_ppm(*in_);
    } else {
        if (file_index_ >= files_.size()) return std::nullopt;
        const auto& path = files_[file_index_++];
        std::ifstream file(path, std::ios::binary);
        if (!file) throw Error(ErrorCode::IoError, "cannot open " + path.string());
        f = read_ppm(file);
        if (!f) throw Error(ErrorCode::TruncatedPayload, path.string() + " is empty");
    }
    if (!f) return std::nullopt;
    if (size_ && f->size() != *size_) throw Error(ErrorCode::DimMismatch, "PPM sequence frames differ in size");
    size_ = f->size();
    return f;
}

PpmSequenceWriter::PpmSequenceWriter(std::ostream& out) : out_(&out) {}

PpmSequenceWriter::PpmSequenceWriter(std::filesystem::path directory) : directory_(std::move(directory)) {
    std::error_code ec;
    std::filesystem::create_directories(directory_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + directory_.string() + ": " + ec.message());
}

void PpmSequenceWriter::write(const Frame& f) {
    if (out_) {
        write_ppm(*out_, f);
        if (!*out_) throw Error(ErrorCode::IoError, "failed writing PPM frame");
    } else {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05zu.ppm", count_);
        std::ofstream file(directory_ / name, std::ios::binary);
        write_ppm(file, f);
        if (!file) throw Error(ErrorCode::IoError, "failed writing " + (directory_ / name).string());
    }
    ++count_;
}

void PpmSequenceWriter::finish() {
    if (out_) out_->flush();
}

}  // namespace wavescrub
