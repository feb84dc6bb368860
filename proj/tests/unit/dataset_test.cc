// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <set>

#include "velocomp/data/batching.hpp"
#include "velocomp/data/fceb.hpp"
#include "velocomp/data/synthetic.hpp"
#include "velocomp/error.hpp"

namespace velocomp::data {
namespace {

// M = N = D = 2, seen (0,0) (1,1), unseen (0,1); one train and one test sample.
EmbeddingDataset fixture(std::vector<Sample> samples) {
  czsl::LabelSpace space(attribute_labels(2), object_labels(2), {{0, 0}, {1, 1}}, {{0, 1}});
  return make_dataset(std::move(space), Tensor({2, 2}, {1, 0, 0, 1}), Tensor({2, 2}, {0.5, 0.5, -0.5, 0.5}),
                      Tensor({3, 2}, {0.25, 0.75, 0.5, -1, 1, 1}), false, kMultiPath, std::move(samples));
}

Sample sample(std::uint32_t a, std::uint32_t o, Split split, double base) {
  Sample s;
  s.attr = a;
  s.obj = o;
  s.split = split;
  s.attr_feature = {base, base + 1};
  s.obj_feature = {base + 2, base + 3};
  s.comp_feature = {base + 4, base + 5};
  return s;
}

EmbeddingDataset two_samples() {
  return fixture({sample(0, 0, Split::kTrain, 0.5), sample(0, 1, Split::kTest, -2.0)});
}

TEST(Fceb, TwoSampleByteLength) {
  const std::string bytes = encode_dataset(two_samples());
  // header 6*4, seen table 4+2*8, unseen table 4+1*8, mask 1,
  // text rows (2+2+3)*2 floats, sample count 4, samples 2*(4+4+1+3*2*4)
  const std::size_t want = 24 + 20 + 12 + 1 + 7 * 2 * 4 + 4 + 2 * (9 + 24);
  EXPECT_EQ(bytes.size(), want);
  EXPECT_EQ(encoded_size(2, 2, 2, 3, 2, 1, kMultiPath, 2), want);
  EXPECT_EQ(bytes.substr(0, 4), "FCEB");
}

TEST(Fceb, RoundTripIsBitExact) {
  const EmbeddingDataset ds = two_samples();
  const std::string bytes = encode_dataset(ds);
  const EmbeddingDataset back = decode_dataset(bytes);
  EXPECT_EQ(encode_dataset(back), bytes);
  ASSERT_EQ(back.samples.size(), 2u);
  EXPECT_EQ(back.samples[1].obj_feature, (Vec{0.0, 1.0}));
  EXPECT_EQ(back.samples[1].split, Split::kTest);
  EXPECT_EQ(back.label_space.unseen(), (std::vector<Pair>{{0, 1}}));
  EXPECT_EQ(back.comp_text.labels()[2], "a0 o1");
}

TEST(Fceb, SaveLoadSaveIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "velocomp_fceb";
  std::filesystem::create_directories(dir);
  SyntheticConfig cfg;
  cfg.attributes = 3;
  cfg.objects = 4;
  cfg.dim = 5;
  save_dataset(generate_synthetic(cfg), dir / "a.fceb");
  save_dataset(load_dataset(dir / "a.fceb"), dir / "b.fceb");
  EXPECT_EQ(encode_dataset(load_dataset(dir / "a.fceb")), encode_dataset(load_dataset(dir / "b.fceb")));
}

TEST(Fceb, EmptySampleList) {
  const EmbeddingDataset ds = fixture({});
  const std::string bytes = encode_dataset(ds);
  EXPECT_EQ(bytes.size(), encoded_size(2, 2, 2, 3, 2, 1, kMultiPath, 0));
  EXPECT_TRUE(decode_dataset(bytes).samples.empty());
}

TEST(Fceb, TruncationAndHeaderErrors) {
  const std::string bytes = encode_dataset(two_samples());
  for (std::size_t cut : {std::size_t{3}, std::size_t{20}, std::size_t{60}, bytes.size() - 1}) {
    EXPECT_THROW(decode_dataset(bytes.substr(0, cut)), FormatError) << cut;
  }
  EXPECT_THROW(decode_dataset(bytes + "z"), FormatError);
  std::string bad = bytes;
  bad[1] = 'X';
  EXPECT_THROW(decode_dataset(bad), FormatError);
  bad = bytes;
  bad[4] = 2;
  EXPECT_THROW(decode_dataset(bad), FormatError);
  bad = bytes;
  bad[56] = 5;  // branch mask
  EXPECT_THROW(decode_dataset(bad), FormatError);
}

TEST(Fceb, NonFiniteValueNamesOffset) {
  std::string bytes = encode_dataset(two_samples());
  const float nan = std::nanf("");
  std::memcpy(bytes.data() + 57, &nan, 4);  // first attribute text value
  try {
    decode_dataset(bytes);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 57"), std::string::npos) << e.what();
  }
}

TEST(Fceb, UnseenPairInTrainingIsSplitError) {
  EXPECT_THROW(fixture({sample(0, 1, Split::kTrain, 0.0)}), SplitError);
  // The same through the decoder: flip the test sample's split tag to train.
  std::string bytes = encode_dataset(two_samples());
  const std::size_t second = 24 + 20 + 12 + 1 + 56 + 4 + 33;
  bytes[second + 8] = 0;
  EXPECT_THROW(decode_dataset(bytes), SplitError);
}

TEST(Dataset, DuplicateTextRowsAreRejected) {
  czsl::LabelSpace space(attribute_labels(2), object_labels(2), {{0, 0}, {1, 1}}, {{0, 1}});
  EXPECT_THROW(make_dataset(space, Tensor({2, 2}, {1, 0, 1, 0}), Tensor({2, 2}, {0.5, 0.5, -0.5, 0.5}),
                            Tensor({3, 2}, {0.25, 0.75, 0.5, -1, 1, 1}), false, kMultiPath, {}),
               DataError);
}

TEST(Dataset, SinglePathFeaturesFallBackToComposition) {
  czsl::LabelSpace space(attribute_labels(2), object_labels(2), {{0, 0}, {1, 1}}, {{0, 1}});
  Sample s;
  s.comp_feature = {0.3, 0.4};
  const auto ds = make_dataset(space, Tensor({2, 2}, {1, 0, 0, 1}), Tensor({2, 2}, {0.5, 0.5, -0.5, 0.5}),
                               Tensor({3, 2}, {0.25, 0.75, 0.5, -1, 1, 1}), false, kSinglePath, {s});
  EXPECT_FALSE(ds.multi_path());
  EXPECT_EQ(ds.samples[0].feature(Branch::kAttribute)[1], 0.4);
  const std::string bytes = encode_dataset(ds);
  EXPECT_EQ(bytes.size(), encoded_size(2, 2, 2, 3, 2, 1, kSinglePath, 1));
  EXPECT_EQ(encode_dataset(decode_dataset(bytes)), bytes);
}

TEST(Synthetic, SameSeedSameDataset) {
  SyntheticConfig cfg;
  cfg.seed = 42;
  const std::string a = encode_dataset(generate_synthetic(cfg));
  EXPECT_EQ(a, encode_dataset(generate_synthetic(cfg)));
  cfg.seed = 43;
  EXPECT_NE(a, encode_dataset(generate_synthetic(cfg)));
}

TEST(Synthetic, NoiselessFeaturesEqualText) {
  SyntheticConfig cfg;
  cfg.attr_noise = cfg.obj_noise = 0.0;
  cfg.leakage = 0.0;
  cfg.modality_gap = 0.0;
  const auto ds = generate_synthetic(cfg);
  for (const Sample& s : ds.samples) {
    const auto at = ds.attr_text.row(s.attr);
    const auto ot = ds.obj_text.row(s.obj);
    const auto ct = ds.comp_text.row(*ds.composition_row(s.pair()));
    EXPECT_TRUE(std::equal(at.begin(), at.end(), s.attr_feature.begin()));
    EXPECT_TRUE(std::equal(ot.begin(), ot.end(), s.obj_feature.begin()));
    EXPECT_TRUE(std::equal(ct.begin(), ct.end(), s.comp_feature.begin()));
  }
}

TEST(Synthetic, DefaultPartitionCountsAndCoverage) {
  SyntheticConfig cfg;
  cfg.attr_noise = cfg.obj_noise = 0.05;
  cfg.leakage = 0.25;
  const auto ds = generate_synthetic(cfg);
  EXPECT_EQ(ds.label_space.seen().size(), 32u);
  EXPECT_EQ(ds.label_space.unseen().size(), 32u);
  std::set<std::uint32_t> attrs, objs;
  for (std::size_t i : ds.split_indices(Split::kTrain)) {
    attrs.insert(ds.samples[i].attr);
    objs.insert(ds.samples[i].obj);
    EXPECT_TRUE(ds.label_space.is_seen(ds.samples[i].pair()));
  }
  EXPECT_EQ(attrs.size(), 8u);
  EXPECT_EQ(objs.size(), 8u);
  EXPECT_EQ(ds.comp_pairs.size(), 64u);
  EXPECT_EQ(ds.split_indices(Split::kTrain).size(), 32u * 8);
  EXPECT_EQ(ds.split_indices(Split::kTest).size(), 64u * 4);
}

TEST(Synthetic, ConfigValidation) {
  SyntheticConfig cfg;
  cfg.attributes = 1;
  cfg.objects = 3;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = {};
  cfg.seen_fraction = 1.0;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = {};
  cfg.seen_fraction = 0.05;  // 3 seen pairs cannot cover 8 primitives
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = {};
  cfg.leakage = 1.5;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = {};
  cfg.attr_noise = -0.1;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
}

TEST(Batching, SizesAndDeterminism) {
  SyntheticConfig cfg;
  cfg.attributes = 2;
  cfg.objects = 2;
  cfg.seen_fraction = 0.5;
  cfg.train_per_pair = 5;
  const auto ds = generate_synthetic(cfg);
  ASSERT_EQ(ds.split_indices(Split::kTrain).size(), 10u);
  const auto batches = make_batches(ds, Split::kTrain, 3, 9);
  std::vector<std::size_t> sizes;
  std::set<std::size_t> seen;
  for (const auto& b : batches) {
    sizes.push_back(b.size());
    seen.insert(b.begin(), b.end());
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 3, 1}));
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_EQ(make_batches(ds, Split::kTrain, 3, 9), batches);
  EXPECT_EQ(make_batches(ds, Split::kTrain, 50, 9).size(), 1u);
  EXPECT_THROW(make_batches(ds, Split::kTrain, 0, 9), ConfigError);
  const auto empty = fixture({sample(0, 0, Split::kTrain, 0.0)});
  EXPECT_THROW(make_batches(empty, Split::kVal, 2, 1), ContractError);
}

TEST(Splits, NamesParse) {
  EXPECT_EQ(parse_split("val"), Split::kVal);
  EXPECT_EQ(split_name(Split::kTest), "test");
  EXPECT_THROW(parse_split("dev"), ConfigError);
}

}  // namespace
}  // namespace velocomp::data
