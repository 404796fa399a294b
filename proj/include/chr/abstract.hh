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

#ifndef CHR_ABSTRACT_HH_
#define CHR_ABSTRACT_HH_

#include <chr/match.hh>
#include <chr/store.hh>
#include <chr/syntax.hh>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

/**
 * @brief Reference implementation of multiset rewriting with CHR rules
 *
 * Deliberately naive: every step enumerates all injective assignments of
 * store constraints to rule heads. Single threaded.
 */
namespace chr
{
	/**
	 * @brief Store of the abstract semantics
	 *
	 * Items carry hidden tags so that the propagation history can tell
	 * copies of the same constraint apart. Tags are not part of the
	 * logical content: two stores are equal when their canonical forms are.
	 */
	struct AbstractStore
	{
		struct Item
		{
			Constraint constraint;
			/// Non-zero for CHR constraints.
			Id tag = 0;
		};

		std::vector< Item > items;
		/// Fired pure propagation instances, keyed by rule and sorted tags.
		History history;
		Id next_tag = 1;

		static AbstractStore from(std::span< const Constraint > cs);

		void add(Constraint c);
		void add_tagged(Constraint c, Id tag);
		const Item* find(Id tag) const;

		std::vector< Constraint > constraints() const;
		/// Canonical form of the constraints only (history ignored).
		std::string canonical() const;
		/// Canonical form with renumbered tags and the live history, used for memoization.
		std::string state_key() const;
	};

	/// Rule instance: tags in rule head order.
	struct Instance
	{
		std::size_t rule;
		Substitution phi;
		std::vector< Id > tags;
	};

	/// Every applicable instance (matching heads, entailed guard, not in history).
	std::vector< Instance > instances(const AbstractStore& s, const Program& p);

	struct RewriteStep
	{
		std::string rule;
		Instance instance;
		AbstractStore result;
	};

	std::vector< RewriteStep > rewrite_steps(const AbstractStore& s, const Program& p);
	bool is_final(const AbstractStore& s, const Program& p);

	/**
	 * @brief Apply one given rule instance
	 *
	 * Checks that the tagged items match the heads under phi modulo the
	 * store's equations, that the guard is entailed and that a pure
	 * propagation instance is not in the history. Nothing on failure.
	 * With inconsistent equations every instance of the right predicates
	 * is accepted (anything follows from false).
	 */
	std::optional< AbstractStore > apply_rule_instance(const AbstractStore& s, const Program& p,
		std::size_t rule, const Substitution& phi, std::span< const Id > tags);

	struct Limits
	{
		std::size_t max_states = 200000;
		std::size_t max_depth = 200;
	};

	class LimitExceeded : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	struct FinalStores
	{
		/// Canonical form -> one representative final store.
		std::map< std::string, AbstractStore > stores;
		std::size_t states = 0;

		std::vector< std::string > forms() const;
	};

	/// Every reachable final store. Throws LimitExceeded when a bound is hit.
	FinalStores final_stores(const AbstractStore& s, const Program& p, const Limits& limits = {});

	/**
	 * @brief Can two derivations from s be composed concurrently?
	 *
	 * True iff the multisets they simplify are disjoint parts of s, i.e.
	 * hs1 ⊎ hs2 is a sub-multiset of s.
	 */
	bool concurrent_compose_check(std::span< const Constraint > s, std::span< const Constraint > hs1, std::span< const Constraint > hs2);

	/// Random walk of at most max_steps rewrite steps, choices drawn from seed.
	AbstractStore run_abstract(AbstractStore s, const Program& p, std::uint64_t seed, std::size_t max_steps,
		std::vector< RewriteStep >* log = nullptr);
}

#endif /* CHR_ABSTRACT_HH_ */
