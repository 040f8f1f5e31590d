#include <doctest.h>

#include <set>
#include <string>

#include "uberledger/digest.hpp"
#include "uberledger/rng.hpp"
#include "uberledger/types.hpp"

using namespace uberledger;

TEST_CASE("sha256 matches the FIPS 180-2 'abc' vector") {
  const std::string abc = "abc";
  const auto d = sha256({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()});
  CHECK(to_hex(d) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(digest_from_hex(to_hex(d)) == d);
  CHECK_THROWS_AS(digest_from_hex("zz"), std::invalid_argument);
}

TEST_CASE("canonical encoder is big-endian and length-prefixed") {
  CanonicalEncoder enc;
  enc.u8(0xab).u32(0x01020304).u64(0x05).str("hi");
  const std::vector<std::uint8_t> expected{0xab, 1, 2, 3, 4, 0, 0, 0, 0, 0, 0, 0, 5, 0, 0, 0, 2, 'h', 'i'};
  CHECK(enc.bytes() == expected);
}

TEST_CASE("SplitMix64 reference vectors") {
  SplitMix64 a(1234567);
  CHECK(a.next() == 6457827717110365317ULL);
  CHECK(a.next() == 3203168211198807973ULL);
  CHECK(a.next() == 9817491932198370423ULL);
  CHECK(a.next() == 4593380528125082431ULL);
  CHECK(a.next() == 16408922859458223821ULL);

  SplitMix64 z(0);
  CHECK(z.next() == 16294208416658607535ULL);
}

TEST_CASE("bounded draws stay in range and streams differ") {
  SplitMix64 r(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    const auto v = r.between(3, 5);
    CHECK((v >= 3 && v <= 5));
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
  std::set<std::uint64_t> seeds{derive_stream_seed(1, "workload"), derive_stream_seed(1, "selection"),
                                derive_stream_seed(2, "workload")};
  CHECK(seeds.size() == 3);
  CHECK(derive_stream_seed(1, "workload") == derive_stream_seed(1, "workload"));
  CHECK(derive_stream_seed(1234567, "workload") == 2101823976808019212ULL);
  CHECK(derive_stream_seed(1234567, "selection") == 13896162031187186023ULL);
  SplitMix64 u(1234567);
  CHECK(u.uniform() == 0.3500795420214081);
}

TEST_CASE("amount arithmetic refuses to wrap") {
  CHECK((Amount{5} + Amount{7}).value() == 12);
  CHECK_THROWS_AS(Amount{1} - Amount{2}, AmountError);
  CHECK_THROWS_AS(Amount{UINT64_MAX} + Amount{1}, AmountError);
}

TEST_CASE("labels exclude whitespace and IRI delimiters") {
  CHECK(is_valid_label("alice"));
  CHECK(is_valid_label("L1"));
  CHECK_FALSE(is_valid_label(""));
  CHECK_FALSE(is_valid_label("a b"));
  CHECK_FALSE(is_valid_label("a<b"));
  CHECK_FALSE(is_valid_label("a\"b"));
  CHECK_FALSE(is_valid_label("a>"));
  CHECK(AccountId{"L1", "alice"} == AccountId{"L1", "alice"});
  CHECK(AccountId{"L1", "alice"} != AccountId{"L2", "alice"});
}
