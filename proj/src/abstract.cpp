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

#include <chr/abstract.hh>

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_set>

namespace chr
{
	AbstractStore AbstractStore::from(std::span< const Constraint > cs)
	{
		AbstractStore s;
		for (const auto& c : cs)
			s.add(c);
		return s;
	}

	void AbstractStore::add(Constraint c)
	{
		if (is_chr(c))
			add_tagged(std::move(c), next_tag);
		else
			items.push_back(Item{std::move(c), 0});
	}

	void AbstractStore::add_tagged(Constraint c, Id tag)
	{
		items.push_back(Item{std::move(c), tag});
		next_tag = std::max(next_tag, tag + 1);
	}

	const AbstractStore::Item* AbstractStore::find(Id tag) const
	{
		for (const auto& it : items)
			if (it.tag == tag && tag != 0) return &it;
		return nullptr;
	}

	std::vector< Constraint > AbstractStore::constraints() const
	{
		std::vector< Constraint > out;
		out.reserve(items.size());
		for (const auto& it : items)
			out.push_back(it.constraint);
		return out;
	}

	std::string AbstractStore::canonical() const
	{
		auto cs = constraints();
		return chr::canonical(cs);
	}

	namespace
	{
		std::vector< Equation > equations_of(const AbstractStore& s)
		{
			std::vector< Equation > eqs;
			for (const auto& it : s.items)
				if (const auto* e = std::get_if< Equation >(&it.constraint))
					eqs.push_back(*e);
			return eqs;
		}

		struct Tagged
		{
			Id tag;
			Chr constraint;
		};

		std::vector< Tagged > chr_items(const AbstractStore& s, const Substitution& theta)
		{
			std::vector< Tagged > out;
			for (const auto& it : s.items)
				if (const auto* c = std::get_if< Chr >(&it.constraint))
					out.push_back(Tagged{it.tag, normalize(theta, *c)});
			return out;
		}
	}

	std::string AbstractStore::state_key() const
	{
		auto theta = mgu(equations_of(*this));
		Substitution none;
		auto chrs = chr_items(*this, theta ? *theta : none);
		std::vector< std::pair< std::string, Id > > order;
		for (const auto& t : chrs)
			order.emplace_back(to_string(t.constraint), t.tag);
		std::sort(order.begin(), order.end());
		std::map< Id, Id > renumber;
		for (std::size_t i = 0; i < order.size(); ++i)
			renumber[order[i].second] = i + 1;

		std::vector< std::string > hist;
		for (const auto& [rule, tags] : history)
		{
			std::vector< Id > mapped;
			bool live = true;
			for (Id t : tags)
			{
				auto it = renumber.find(t);
				if (it == renumber.end()) { live = false; break; }
				mapped.push_back(it->second);
			}
			if (!live) continue;
			std::sort(mapped.begin(), mapped.end());
			std::string h = std::to_string(rule) + ":";
			for (Id t : mapped)
				h += std::to_string(t) + ".";
			hist.push_back(std::move(h));
		}
		std::sort(hist.begin(), hist.end());
		std::string key = canonical() + " |";
		for (const auto& h : hist)
			key += " " + h;
		return key;
	}

	namespace
	{
		void assign(const Program& p, std::size_t ri, const std::vector< Tagged >& chrs, const Substitution& theta,
			const History& history, std::size_t k, std::vector< std::size_t >& picked, const Substitution& phi,
			std::vector< Instance >& out)
		{
			const Rule& r = p.rules[ri];
			if (k == r.head_count())
			{
				if (!entails_solved(theta, phi, r.guard)) return;
				std::vector< Id > tags;
				for (auto j : picked)
					tags.push_back(chrs[j].tag);
				if (r.is_propagation() && history.count({ri, history_key(tags)})) return;
				out.push_back(Instance{ri, phi, std::move(tags)});
				return;
			}
			for (std::size_t j = 0; j < chrs.size(); ++j)
			{
				if (std::find(picked.begin(), picked.end(), j) != picked.end()) continue;
				auto ext = match(r.head(k), chrs[j].constraint, phi);
				if (!ext) continue;
				picked.push_back(j);
				assign(p, ri, chrs, theta, history, k + 1, picked, *ext, out);
				picked.pop_back();
			}
		}

		AbstractStore fire(const AbstractStore& s, const Program& p, const Instance& inst)
		{
			const Rule& r = p.rules[inst.rule];
			AbstractStore out;
			out.history = s.history;
			out.next_tag = s.next_tag;
			std::vector< Id > removed(inst.tags.begin() + static_cast< std::ptrdiff_t >(r.propagated.size()), inst.tags.end());
			for (const auto& it : s.items)
				if (it.tag == 0 || std::find(removed.begin(), removed.end(), it.tag) == removed.end())
					out.items.push_back(it);
			if (r.is_propagation())
				out.history.insert({inst.rule, history_key(inst.tags)});
			for (auto& b : instantiate_body(r, inst.phi))
				out.add(std::move(b));
			return out;
		}
	}

	std::vector< Instance > instances(const AbstractStore& s, const Program& p)
	{
		std::vector< Instance > out;
		auto theta = mgu(equations_of(s));
		if (!theta) return out;
		auto chrs = chr_items(s, *theta);
		std::vector< std::size_t > picked;
		for (std::size_t ri = 0; ri < p.rules.size(); ++ri)
			assign(p, ri, chrs, *theta, s.history, 0, picked, Substitution{}, out);
		return out;
	}

	std::vector< RewriteStep > rewrite_steps(const AbstractStore& s, const Program& p)
	{
		std::vector< RewriteStep > out;
		for (auto& inst : instances(s, p))
		{
			AbstractStore next = fire(s, p, inst);
			std::string name = p.rules[inst.rule].name;
			out.push_back(RewriteStep{std::move(name), std::move(inst), std::move(next)});
		}
		return out;
	}

	bool is_final(const AbstractStore& s, const Program& p)
	{
		return instances(s, p).empty();
	}

	std::optional< AbstractStore > apply_rule_instance(const AbstractStore& s, const Program& p,
		std::size_t rule, const Substitution& phi, std::span< const Id > tags)
	{
		if (rule >= p.rules.size()) return std::nullopt;
		const Rule& r = p.rules[rule];
		if (tags.size() != r.head_count()) return std::nullopt;
		for (std::size_t i = 0; i < tags.size(); ++i)
			for (std::size_t j = 0; j < i; ++j)
				if (tags[i] == tags[j]) return std::nullopt;

		auto theta = mgu(equations_of(s));
		for (std::size_t k = 0; k < tags.size(); ++k)
		{
			const auto* item = s.find(tags[k]);
			if (!item) return std::nullopt;
			const Chr& c = std::get< Chr >(item->constraint);
			const Chr& h = r.head(k);
			if (c.pred != h.pred || c.args.size() != h.args.size()) return std::nullopt;
			if (theta && normalize(*theta, apply(phi, h)) != normalize(*theta, c))
				return std::nullopt;
		}
		if (theta && !entails_solved(*theta, phi, r.guard)) return std::nullopt;
		std::vector< Id > tv(tags.begin(), tags.end());
		if (r.is_propagation() && s.history.count({rule, history_key(tv)})) return std::nullopt;
		return fire(s, p, Instance{rule, phi, std::move(tv)});
	}

	std::vector< std::string > FinalStores::forms() const
	{
		std::vector< std::string > out;
		for (const auto& [k, v] : stores)
			out.push_back(k);
		return out;
	}

	FinalStores final_stores(const AbstractStore& s, const Program& p, const Limits& limits)
	{
		FinalStores out;
		std::unordered_set< std::string > seen;
		std::vector< std::pair< AbstractStore, std::size_t > > stack;
		stack.emplace_back(s, 0);
		seen.insert(s.state_key());
		while (!stack.empty())
		{
			auto [cur, depth] = std::move(stack.back());
			stack.pop_back();
			++out.states;
			auto steps = rewrite_steps(cur, p);
			if (steps.empty())
			{
				out.stores.emplace(cur.canonical(), cur);
				continue;
			}
			if (depth + 1 > limits.max_depth)
				throw LimitExceeded("derivation deeper than " + std::to_string(limits.max_depth));
			for (auto& st : steps)
			{
				if (!seen.insert(st.result.state_key()).second) continue;
				if (seen.size() > limits.max_states)
					throw LimitExceeded("more than " + std::to_string(limits.max_states) + " states");
				stack.emplace_back(std::move(st.result), depth + 1);
			}
		}
		return out;
	}

	bool concurrent_compose_check(std::span< const Constraint > s, std::span< const Constraint > hs1, std::span< const Constraint > hs2)
	{
		std::vector< Equation > eqs;
		for (const auto& c : s)
			if (const auto* e = std::get_if< Equation >(&c))
				eqs.push_back(*e);
		auto theta = mgu(eqs);
		Substitution none;
		const Substitution& th = theta ? *theta : none;
		std::map< std::string, long > budget;
		for (const auto& c : s)
			++budget[to_string(normalize(th, c))];
		for (auto part : {hs1, hs2})
			for (const auto& c : part)
				if (--budget[to_string(normalize(th, c))] < 0)
					return false;
		return true;
	}

	AbstractStore run_abstract(AbstractStore s, const Program& p, std::uint64_t seed, std::size_t max_steps,
		std::vector< RewriteStep >* log)
	{
		std::mt19937_64 rng(seed);
		for (std::size_t i = 0; i < max_steps; ++i)
		{
			auto steps = rewrite_steps(s, p);
			if (steps.empty()) break;
			std::uniform_int_distribution< std::size_t > pick(0, steps.size() - 1);
			auto& st = steps[pick(rng)];
			s = st.result;
			if (log) log->push_back(std::move(st));
		}
		return s;
	}
}
