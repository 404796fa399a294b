/*
 *  This program is free software; you can redistribute it and/or
 *  modify it under the terms of the Apache License, Version 2.0.
 *
 *  Copyright:
 *     2026, The cgchr authors
 *
 *     Licensed under the Apache License, Version 2.0 (the "License");
 *     you may not use this file except in compliance with the License.
 *     You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *     Unless required by applicable law or agreed to in writing, software
 *     distributed under the License is distributed on an "AS IS" BASIS,
 *     WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *     See the License for the specific language governing permissions and
 *     limitations under the License.
 *
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hh"

#include <chr/abstract.hh>

using namespace chr;

namespace
{
	std::vector< std::string > oracle(const char* prog, const char* goals)
	{
		auto p = parse_program(prog);
		return final_stores(AbstractStore::from(parse_goals(goals)), p).forms();
	}

	const char* gcd = "gcd1 @ Gcd(0) <=> true.\ngcd2 @ Gcd(n) \\ Gcd(m) <=> m>=n && n>0 | Gcd(m-n).";
	const char* get = "get @ Get(x), Put(y) <=> x=y.";
}

TEST_CASE("gcd has one final store")
{
	CHECK(oracle(gcd, "Gcd(3), Gcd(3), Gcd(9)") == std::vector< std::string >{"{Gcd(3)} {}"});
	CHECK(oracle(gcd, "Gcd(0)") == std::vector< std::string >{"{} {}"});
	CHECK(oracle(gcd, "Gcd(4), Gcd(6)") == std::vector< std::string >{"{Gcd(2)} {}"});
}

TEST_CASE("channel has two final stores")
{
	CHECK(oracle(get, "Get(m), Put(1), Get(n), Put(8)") == std::vector< std::string >{"{} {m=1,n=8}", "{} {m=8,n=1}"});
	// One Get for two Puts leaves either Put behind.
	CHECK(oracle(get, "Get(m), Put(1), Put(2)").size() == 2);
}

TEST_CASE("inconsistent stores are final")
{
	auto forms = oracle(get, "Get(x), Get(x), Put(1), Put(2)");
	REQUIRE(forms.size() == 1);
	CHECK(forms[0].find("false") != std::string::npos);
}

TEST_CASE("propagation fires once per instance")
{
	CHECK(oracle("r @ P(x) ==> Q(x).", "P(1), P(1)") == std::vector< std::string >{"{P(1),P(1),Q(1),Q(1)} {}"});
	CHECK(oracle("r @ P(x), P(y) ==> x<y | L(x,y).", "P(1), P(2), P(3)")
		== std::vector< std::string >{"{L(1,2),L(1,3),L(2,3),P(1),P(2),P(3)} {}"});
}

TEST_CASE("merge sort on four numbers")
{
	auto c = test::load_case("merge");
	auto forms = final_stores(AbstractStore::from(parse_goals("Merge(1,3), Merge(1,1), Merge(1,4), Merge(1,2)")), c.program)
		.forms();
	CHECK(forms == std::vector< std::string >{"{Leq(1,2),Leq(2,3),Leq(3,4),Merge(3,1)} {}"});
}

TEST_CASE("rule instances are checked")
{
	auto p = parse_program(gcd);
	auto s = AbstractStore::from(parse_goals("Gcd(3), Gcd(9)"));
	Substitution phi{{Var{"n", p.rules[1].scope}, Term::integer(3)}, {Var{"m", p.rules[1].scope}, Term::integer(9)}};
	Id good[] = {1, 2};
	auto next = apply_rule_instance(s, p, 1, phi, good);
	REQUIRE(next);
	CHECK(next->canonical() == "{Gcd(3),Gcd(6)} {}");

	// Swapped heads fail the guard.
	Id swapped[] = {2, 1};
	CHECK_FALSE(apply_rule_instance(s, p, 1, phi, swapped));
	Id same[] = {1, 1};
	CHECK_FALSE(apply_rule_instance(s, p, 1, phi, same));
	Id missing[] = {1, 7};
	CHECK_FALSE(apply_rule_instance(s, p, 1, phi, missing));
	// Wrong rule for the heads.
	Id one[] = {1};
	CHECK_FALSE(apply_rule_instance(s, p, 0, {}, one));
}

TEST_CASE("concurrent composition needs disjoint removals")
{
	auto s = parse_goals("A, B, C");
	auto a = parse_goals("A");
	auto b = parse_goals("B");
	CHECK(concurrent_compose_check(s, a, b));
	CHECK_FALSE(concurrent_compose_check(s, a, a));
	auto twice = parse_goals("A, A, B");
	CHECK(concurrent_compose_check(twice, a, a));
}

TEST_CASE("property: random walks end in an enumerated final store")
{
	std::mt19937 rng(13);
	int checked = 0;
	for (int round = 0; round < 150; ++round)
	{
		auto fc = test::fuzz_case(rng);
		auto p = parse_program(fc.program);
		auto s = AbstractStore::from(parse_goals(fc.goals));
		FinalStores all;
		try
		{
			all = final_stores(s, p, Limits{5000, 200});
		}
		catch (const LimitExceeded&)
		{
			continue;
		}
		++checked;
		CAPTURE(fc.program);
		CAPTURE(fc.goals);
		for (const auto& [form, store] : all.stores)
			CHECK(is_final(store, p));
		for (std::uint64_t seed = 0; seed < 3; ++seed)
		{
			auto end = run_abstract(s, p, seed, 100000);
			CHECK(is_final(end, p));
			CHECK(all.stores.count(end.canonical()));
		}
	}
	CHECK(checked > 100);
}
