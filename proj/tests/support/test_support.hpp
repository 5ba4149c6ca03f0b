#pragma once

// Shared fixtures: a byte-level capture builder that does not go through
// the library writer, synthetic datasets, and scratch directories.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ransomnet/capture.hpp"
#include "ransomnet/classifiers.hpp"
#include "ransomnet/conversation.hpp"
#include "ransomnet/features.hpp"
#include "ransomnet/rng.hpp"

namespace testsupport {

using Bytes = std::vector<unsigned char>;

inline void put_le32(Bytes& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
inline void put_le16(Bytes& b, std::uint16_t v) {
  b.push_back(static_cast<unsigned char>(v));
  b.push_back(static_cast<unsigned char>(v >> 8));
}
inline void put_be32(Bytes& b, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
inline void put_be16(Bytes& b, std::uint16_t v) {
  b.push_back(static_cast<unsigned char>(v >> 8));
  b.push_back(static_cast<unsigned char>(v));
}

// Little-endian, microsecond classic pcap assembled by hand.
class PcapBuilder {
public:
  explicit PcapBuilder(std::uint32_t link_type = 1, std::uint32_t magic = 0xA1B2C3D4) {
    put_le32(data_, magic);
    put_le16(data_, 2);
    put_le16(data_, 4);
    put_le32(data_, 0);
    put_le32(data_, 0);
    put_le32(data_, 65535);
    put_le32(data_, link_type);
  }

  // `seconds` and `fraction` go to the record header verbatim (fraction is
  // micro- or nanoseconds depending on the magic).
  void record(std::uint32_t seconds, std::uint32_t fraction, const Bytes& frame, std::uint32_t orig_len) {
    put_le32(data_, seconds);
    put_le32(data_, fraction);
    put_le32(data_, static_cast<std::uint32_t>(frame.size()));
    put_le32(data_, orig_len);
    data_.insert(data_.end(), frame.begin(), frame.end());
  }

  // Full IPv4 frame of `wire` bytes (Ethernet header included).
  void ipv4(double t, const std::string& src, std::uint16_t sport, const std::string& dst, std::uint16_t dport,
            std::uint8_t proto, std::uint32_t wire) {
    const auto us = static_cast<std::uint64_t>(t * 1e6 + 0.5);
    record(static_cast<std::uint32_t>(us / 1000000), static_cast<std::uint32_t>(us % 1000000),
           ipv4_frame(src, sport, dst, dport, proto, wire), wire);
  }

  void arp(double t) {
    Bytes f(42, 0);
    std::fill(f.begin(), f.begin() + 6, 0xff);
    f[12] = 0x08;
    f[13] = 0x06;
    const auto us = static_cast<std::uint64_t>(t * 1e6 + 0.5);
    record(static_cast<std::uint32_t>(us / 1000000), static_cast<std::uint32_t>(us % 1000000), f, 42);
  }

  static Bytes ipv4_frame(const std::string& src, std::uint16_t sport, const std::string& dst,
                          std::uint16_t dport, std::uint8_t proto, std::uint32_t wire,
                          std::uint16_t frag_field = 0, std::uint16_t ethertype = 0x0800) {
    Bytes f;
    f.reserve(std::max<std::uint32_t>(wire, 64));
    for (unsigned char mac : {0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0x00, 0x11, 0x22, 0x33, 0x44, 0x55}) f.push_back(mac);
    put_be16(f, ethertype);
    f.push_back(0x45);
    f.push_back(0);
    put_be16(f, static_cast<std::uint16_t>(wire - 14));
    put_be16(f, 0x1234);
    put_be16(f, frag_field);
    f.push_back(64);
    f.push_back(proto);
    put_be16(f, 0);
    put_be32(f, ransomnet::Ipv4Address::parse(src)->value());
    put_be32(f, ransomnet::Ipv4Address::parse(dst)->value());
    put_be16(f, sport);
    put_be16(f, dport);
    f.resize(wire, 0);
    return f;
  }

  const Bytes& bytes() const { return data_; }
  std::string str() const { return {data_.begin(), data_.end()}; }

private:
  Bytes data_;
};

inline ransomnet::PacketRecord packet(double t, const std::string& src, std::uint16_t sport,
                                      const std::string& dst, std::uint16_t dport, std::uint8_t proto,
                                      std::uint32_t bytes) {
  ransomnet::PacketRecord p;
  p.timestamp = t;
  p.src_addr = *ransomnet::Ipv4Address::parse(src);
  p.src_port = sport;
  p.dst_addr = *ransomnet::Ipv4Address::parse(dst);
  p.dst_port = dport;
  p.protocol = proto;
  p.wire_bytes = bytes;
  return p;
}

// Packets that aggregate to protocol 6, 192.168.1.4:49252 <-> 192.168.1.5:5357,
// 20 packets / 15137 bytes, 8 / 1396 forward, 12 / 13741 backward, starting
// 1.841135 s into the capture and lasting 0.026054 s. A UDP packet at t=0
// anchors the capture start.
inline std::vector<ransomnet::PacketRecord> table3_row1_packets() {
  std::vector<ransomnet::PacketRecord> out;
  out.push_back(packet(0.0, "192.168.1.9", 137, "192.168.1.255", 137, 17, 92));
  const double start = 1.841135;
  const double end = 1.867189;
  for (int i = 0; i < 20; ++i) {
    const double t = i == 19 ? end : start + 0.001 * i;
    const bool forward = i % 5 == 0 || i % 5 == 3;  // 8 of 20
    if (forward) {
      out.push_back(packet(t, "192.168.1.4", 49252, "192.168.1.5", 5357, 6, i == 0 ? 178 : 174));
    } else {
      out.push_back(packet(t, "192.168.1.5", 5357, "192.168.1.4", 49252, 6, i == 1 ? 1146 : 1145));
    }
  }
  return out;
}

// Two 13-dimensional Gaussian clusters with per-feature scales spanning
// several orders of magnitude; class means are 4 standard deviations apart
// in every dimension.
inline ransomnet::Dataset gaussian_clusters(std::size_t positives, std::size_t negatives, std::uint64_t seed,
                                            double separation = 4.0) {
  static constexpr double kScale[ransomnet::kFeatureCount] = {1,   1e9, 1e4, 1e9, 1e3, 50,  1e5,
                                                              20,  1e4, 30,  1e5, 100, 10};
  ransomnet::Rng rng(seed);
  ransomnet::Dataset d;
  auto draw = [&](ransomnet::Label label) {
    ransomnet::LabeledSample s;
    s.label = label;
    const double centre = label == ransomnet::Label::Ransomware ? separation / 2 : -separation / 2;
    for (std::size_t j = 0; j < ransomnet::kFeatureCount; ++j) {
      s.features[j] = kScale[j] * (10.0 + centre + rng.normal());
    }
    d.samples.push_back(s);
  };
  for (std::size_t i = 0; i < positives; ++i) draw(ransomnet::Label::Ransomware);
  for (std::size_t i = 0; i < negatives; ++i) draw(ransomnet::Label::Benign);
  rng.shuffle(d.samples.begin(), d.samples.end());
  return d;
}

// Same idea as gaussian_clusters, but every sample is a valid encoded
// conversation (integral counts, consistent totals, microsecond times), so
// the set survives the dataset CSV.
inline ransomnet::Dataset gaussian_conversations(std::size_t positives, std::size_t negatives, std::uint64_t seed) {
  ransomnet::Rng rng(seed);
  ransomnet::Dataset d;
  auto draw = [&](ransomnet::Label label) {
    const double c = label == ransomnet::Label::Ransomware ? 2.0 : -2.0;
    auto g = [&](double scale) { return scale * (10.0 + c + rng.normal()); };
    auto count = [&](double scale, double floor) { return std::max(floor, std::round(g(scale))); };
    ransomnet::Conversation conv;
    conv.protocol = 6;
    conv.address_a = ransomnet::Ipv4Address(static_cast<std::uint32_t>(count(2e8, 0)));
    conv.port_a = static_cast<std::uint16_t>(count(3e3, 0));
    conv.address_b = ransomnet::Ipv4Address(static_cast<std::uint32_t>(count(2e8, 0)));
    conv.port_b = static_cast<std::uint16_t>(count(4e3, 0));
    conv.packets_ab = static_cast<std::uint64_t>(count(20, 1));
    conv.bytes_ab = static_cast<std::uint64_t>(count(1e4, 0));
    conv.packets_ba = static_cast<std::uint64_t>(count(30, 0));
    conv.bytes_ba = static_cast<std::uint64_t>(count(2e4, 0));
    conv.packets_total = conv.packets_ab + conv.packets_ba;
    conv.bytes_total = conv.bytes_ab + conv.bytes_ba;
    conv.rel_start = count(1e7, 0) / 1e6;
    conv.duration = count(1e6, 0) / 1e6;
    ransomnet::LabeledSample s;
    s.features = ransomnet::encode(conv);
    s.label = label;
    d.samples.push_back(s);
  };
  for (std::size_t i = 0; i < positives; ++i) draw(ransomnet::Label::Ransomware);
  for (std::size_t i = 0; i < negatives; ++i) draw(ransomnet::Label::Benign);
  rng.shuffle(d.samples.begin(), d.samples.end());
  return d;
}

inline ransomnet::Hyperparams fast_hyperparams(std::uint64_t seed = 42) {
  ransomnet::Hyperparams hp;
  hp.seed = seed;
  hp.mlp.epochs = 100;
  hp.forest.trees = 10;
  hp.svm.iterations = 5000;
  return hp;
}

class ScratchDir {
public:
  explicit ScratchDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("ransomnet_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() { std::filesystem::remove_all(path_); }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace testsupport
