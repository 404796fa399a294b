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
#include <chr/goal_engine.hh>

using namespace chr;

namespace
{
	RunResult run(const char* prog, const char* goals, Policy policy = Policy::Fifo, std::uint64_t max_steps = 0)
	{
		static std::vector< Program > keep;
		keep.reserve(64);
		keep.push_back(parse_program(prog));
		SequentialOptions o;
		o.policy = policy;
		o.max_steps = max_steps;
		return run_sequential(keep.back(), parse_goals(goals), o);
	}

	std::string goals_text(const std::deque< Goal >& gs)
	{
		std::string s;
		for (const auto& g : gs)
			s += (s.empty() ? "" : " ") + to_string(g);
		return s;
	}
}

TEST_CASE("channel derivation step by step")
{
	auto p = parse_program("get @ Get(x), Put(y) <=> x=y.");
	std::vector< std::string > states;
	SequentialOptions o;
	o.observer = [&](const std::deque< Goal >& gs, const Store& s, const History&, const TraceStep&) {
		std::string st = s.dump();
		std::replace(st.begin(), st.end(), '\n', ' ');
		states.push_back("<" + goals_text(gs) + " | " + st + ">");
	};
	auto r = run_sequential(p, parse_goals("Get(x1), Get(x2), Put(1), Put(2)"), o);

	struct Expect
	{
		StepKind kind;
		Id id;
		std::vector< Id > simplified;
	};
	std::vector< Expect > expect{
		{StepKind::Activate, 1, {}},
		{StepKind::Drop, 1, {}},
		{StepKind::Activate, 2, {}},
		{StepKind::Drop, 2, {}},
		{StepKind::Activate, 3, {}},
		{StepKind::Simplify, 3, {1, 3}},
		{StepKind::Activate, 4, {}},
		{StepKind::Simplify, 4, {2, 4}},
		{StepKind::Solve, 0, {}},
		{StepKind::Solve, 0, {}},
	};
	REQUIRE(r.trace.steps.size() == expect.size());
	for (std::size_t i = 0; i < expect.size(); ++i)
	{
		CAPTURE(i);
		const auto& s = r.trace.steps[i];
		CHECK(s.seq == i + 1);
		CHECK(s.kind == expect[i].kind);
		if (s.kind != StepKind::Solve) CHECK(s.id == expect[i].id);
		CHECK(s.simplified == expect[i].simplified);
		CHECK(s.propagated.empty());
	}
	CHECK(states[0] == "<Get(x1)#1 Get(x2) Put(1) Put(2) | Get(x1)#1 >");
	CHECK(states[5] == "<Put(2) x1=1 | Get(x2)#2 >");
	CHECK(states[6] == "<Put(2)#4 x1=1 | Get(x2)#2 Put(2)#4 >");
	CHECK(states[7] == "<x1=1 x2=2 | >");
	CHECK(states[8] == "<x2=2 | x1=1 >");
	CHECK(r.status == Status::Done);
	CHECK(r.store.dump() == "x1=1\nx2=2\n");
}

TEST_CASE("gcd under both policies")
{
	const char* gcd = "gcd1 @ Gcd(0) <=> true.\ngcd2 @ Gcd(n) \\ Gcd(m) <=> m>=n && n>0 | Gcd(m-n).";
	for (Policy pol : {Policy::Fifo, Policy::Lifo})
	{
		auto r = run(gcd, "Gcd(3), Gcd(3), Gcd(9)", pol);
		CHECK(r.status == Status::Done);
		REQUIRE(r.store.alive_count() == 1);
		CHECK(r.store.get(r.store.alive_ids()[0]) == Chr{"Gcd", {Term::integer(3)}});
	}
	CHECK(run(gcd, "Gcd(3), Gcd(3), Gcd(9)").store.dump() == "Gcd(3)#6\n");
}

TEST_CASE("empty program and goals")
{
	auto r = run("", "");
	CHECK(r.status == Status::Done);
	CHECK(r.store.dump().empty());
	CHECK(r.trace.steps.empty());

	auto s = run("", "A, B");
	CHECK(s.store.dump() == "A#1\nB#2\n");
}

TEST_CASE("solving wakes stored constraints")
{
	auto r = run("r @ A(x), B(x) <=> C.", "A(y), B(1), y=1");
	CHECK(r.store.dump() == "C#3\ny=1\n");
	bool woke = false;
	for (const auto& s : r.trace.steps)
		if (s.kind == StepKind::Solve) woke = s.propagated == std::vector< Id >{1};
	CHECK(woke);
}

TEST_CASE("equated variables entail equality guards")
{
	auto r = run("r @ A(x), B(y) <=> x==y | C.", "A(u), B(v), u=v");
	CHECK(r.store.dump() == "C#3\nu=v\n");
}

TEST_CASE("propagation history")
{
	auto r = run("r @ P(x) ==> Q(x).", "P(1), P(1)");
	CHECK(r.store.dump() == "P(1)#1\nP(1)#2\nQ(1)#3\nQ(1)#4\n");
	CHECK(r.history.size() == 2);
}

TEST_CASE("failure and step limit")
{
	auto f = run("get @ Get(x), Put(y) <=> x=y.", "Get(x), Get(x), Put(1), Put(2)");
	CHECK(f.status == Status::Failed);

	auto l = run("r @ A(x) <=> A(x+1).", "A(0)", Policy::Fifo, 50);
	CHECK(l.status == Status::StepLimit);
	CHECK(l.trace.steps.size() == 50);
	CHECK_FALSE(l.goals.empty());
}

TEST_CASE("dump is deterministic")
{
	auto c = test::load_case("merge");
	std::string first = run_sequential(c.program, c.goals).store.dump();
	for (int i = 0; i < 5; ++i)
		CHECK(run_sequential(c.program, c.goals).store.dump() == first);
}

TEST_CASE("property: sequential results are abstract final stores")
{
	std::mt19937 rng(17);
	for (int round = 0; round < 150; ++round)
	{
		auto fc = test::fuzz_case(rng);
		auto p = parse_program(fc.program);
		auto goals = parse_goals(fc.goals);
		FinalStores all;
		try
		{
			all = final_stores(AbstractStore::from(goals), p, Limits{5000, 200});
		}
		catch (const LimitExceeded&)
		{
			continue;
		}
		CAPTURE(fc.program);
		CAPTURE(fc.goals);
		for (Policy pol : {Policy::Fifo, Policy::Lifo})
		{
			SequentialOptions o;
			o.policy = pol;
			auto r = run_sequential(p, goals, o);
			CHECK(r.status == Status::Done);
			CHECK(all.stores.count(canonical(r.store.drop_ids())));
		}
	}
}
