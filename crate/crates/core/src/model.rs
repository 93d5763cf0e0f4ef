// SPDX-License-Identifier: Apache-2.0

//! Problem data for the rank pricing problem.
//!
//! An [`Instance`] holds customer budgets and a customer-by-product matrix of
//! preference scores. A missing score means the customer never buys that
//! product. Prices are searched over the [`BudgetGrid`], the sorted distinct
//! budgets, so a candidate solution is a [`PriceVector`] of grid indices.
//!
//! All indices in this crate are 0-based.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Money amounts (budgets, prices, revenue).
pub type Money = u64;

/// Preference score; larger means more preferred.
pub type Score = u64;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("budget of customer {customer} must be positive, got {value}")]
    NonPositiveBudget { customer: usize, value: i64 },
    #[error("preference score at preferences[{customer}][{product}] must be positive, got {value}")]
    NonPositiveScore { customer: usize, product: usize, value: i64 },
    #[error("customer {customer} has tied preferences: preferences[{customer}][{first}] == preferences[{customer}][{second}] == {score}")]
    TiedPreferences { customer: usize, first: usize, second: usize, score: i64 },
    #[error("customer {customer} has no available product")]
    EmptyPreferenceRow { customer: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("price vector has {got} entries, instance has {expected} products")]
    PriceLength { expected: usize, got: usize },
    #[error("price {price} of product {product} is not a budget value")]
    PriceOffGrid { product: usize, price: Money },
    #[error("grid index {index} of product {product} out of range (grid size {size})")]
    IndexOutOfRange { product: usize, index: usize, size: usize },
    #[error("failed to read instance: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Unvalidated instance data, mirroring the on-disk JSON layout.
///
/// `preferences[k][i]` is customer `k`'s score for product `i`; `null` marks a
/// product the customer cannot buy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawInstance {
    pub name: String,
    pub num_products: usize,
    pub num_customers: usize,
    pub budgets: Vec<i64>,
    pub preferences: Vec<Vec<Option<i64>>>,
}

/// A validated problem instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    num_products: usize,
    budgets: Vec<Money>,
    preferences: Vec<Vec<Option<Score>>>,
    // Per customer: available products ordered by decreasing score.
    ranking: Vec<Vec<usize>>,
}

impl Instance {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_products(&self) -> usize {
        self.num_products
    }

    pub fn num_customers(&self) -> usize {
        self.budgets.len()
    }

    pub fn budgets(&self) -> &[Money] {
        &self.budgets
    }

    pub fn budget(&self, customer: usize) -> Money {
        self.budgets[customer]
    }

    /// Score of `product` for `customer`, `None` if unavailable.
    pub fn score(&self, customer: usize, product: usize) -> Option<Score> {
        self.preferences[customer][product]
    }

    pub fn preference_row(&self, customer: usize) -> &[Option<Score>] {
        &self.preferences[customer]
    }

    /// Products available to `customer`, most preferred first.
    pub fn ranking(&self, customer: usize) -> &[usize] {
        &self.ranking[customer]
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            name: self.name.clone(),
            num_products: self.num_products,
            num_customers: self.num_customers(),
            budgets: self.budgets.iter().map(|&b| b as i64).collect(),
            preferences: self
                .preferences
                .iter()
                .map(|row| row.iter().map(|s| s.map(|v| v as i64)).collect())
                .collect(),
        }
    }

    /// Canonical pretty-printed JSON.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_raw()).expect("instance serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let raw: RawInstance = serde_json::from_str(text)?;
        validate_instance(raw)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

/// Checks dimensions, positivity, and tie-freeness, then builds an [`Instance`].
pub fn validate_instance(raw: RawInstance) -> Result<Instance, ModelError> {
    let RawInstance { name, num_products, num_customers, budgets, preferences } = raw;
    if num_products == 0 || num_customers == 0 {
        return Err(ModelError::DimensionMismatch(format!(
            "instance needs at least one product and one customer, got I={num_products} K={num_customers}"
        )));
    }
    if budgets.len() != num_customers {
        return Err(ModelError::DimensionMismatch(format!(
            "num_customers is {num_customers} but {} budgets given",
            budgets.len()
        )));
    }
    if preferences.len() != num_customers {
        return Err(ModelError::DimensionMismatch(format!(
            "num_customers is {num_customers} but {} preference rows given",
            preferences.len()
        )));
    }

    let mut checked_budgets = Vec::with_capacity(num_customers);
    for (customer, &value) in budgets.iter().enumerate() {
        if value <= 0 {
            return Err(ModelError::NonPositiveBudget { customer, value });
        }
        checked_budgets.push(value as Money);
    }

    let mut checked_prefs = Vec::with_capacity(num_customers);
    let mut ranking = Vec::with_capacity(num_customers);
    for (customer, row) in preferences.into_iter().enumerate() {
        if row.len() != num_products {
            return Err(ModelError::DimensionMismatch(format!(
                "preferences[{customer}] has {} entries, expected {num_products}",
                row.len()
            )));
        }
        let mut seen: Vec<(i64, usize)> = Vec::with_capacity(num_products);
        for (product, entry) in row.iter().enumerate() {
            if let Some(value) = *entry {
                if value <= 0 {
                    return Err(ModelError::NonPositiveScore { customer, product, value });
                }
                seen.push((value, product));
            }
        }
        if seen.is_empty() {
            return Err(ModelError::EmptyPreferenceRow { customer });
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(ModelError::TiedPreferences {
                customer,
                first: w[0].1.min(w[1].1),
                second: w[0].1.max(w[1].1),
                score: w[0].0,
            });
        }
        ranking.push(seen.iter().rev().map(|&(_, product)| product).collect());
        checked_prefs.push(row.into_iter().map(|s| s.map(|v| v as Score)).collect());
    }

    Ok(Instance {
        name,
        num_products,
        budgets: checked_budgets,
        preferences: checked_prefs,
        ranking,
    })
}

/// The sorted distinct budgets. Optimal prices always lie on this grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetGrid {
    values: Vec<Money>,
}

impl BudgetGrid {
    pub fn new(inst: &Instance) -> Self {
        Self::from_budgets(inst.budgets())
    }

    pub fn from_budgets(budgets: &[Money]) -> Self {
        let mut values = budgets.to_vec();
        values.sort_unstable();
        values.dedup();
        BudgetGrid { values }
    }

    pub fn values(&self) -> &[Money] {
        &self.values
    }

    /// Number of grid points, `M`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, index: usize) -> Money {
        self.values[index]
    }

    pub fn max_value(&self) -> Money {
        *self.values.last().expect("grid is nonempty")
    }

    pub fn index_of(&self, value: Money) -> Option<usize> {
        self.values.binary_search(&value).ok()
    }

    /// `M^I`, or `None` on overflow.
    pub fn space_size(&self, num_products: usize) -> Option<u64> {
        let m = self.values.len() as u64;
        let exp = u32::try_from(num_products).ok()?;
        m.checked_pow(exp)
    }
}

/// Shorthand for [`BudgetGrid::new`].
pub fn build_grid(inst: &Instance) -> BudgetGrid {
    BudgetGrid::new(inst)
}

/// One price per product, stored as indices into a [`BudgetGrid`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PriceVector(Vec<usize>);

impl PriceVector {
    pub fn new(indices: Vec<usize>) -> Self {
        PriceVector(indices)
    }

    /// Checked construction against a grid.
    pub fn from_indices(grid: &BudgetGrid, indices: Vec<usize>) -> Result<Self, ModelError> {
        if let Some((product, &index)) = indices.iter().enumerate().find(|(_, &m)| m >= grid.len()) {
            return Err(ModelError::IndexOutOfRange { product, index, size: grid.len() });
        }
        Ok(PriceVector(indices))
    }

    /// Maps realized prices back to grid indices; every price must be a budget.
    pub fn from_prices(grid: &BudgetGrid, prices: &[Money]) -> Result<Self, ModelError> {
        prices
            .iter()
            .enumerate()
            .map(|(product, &price)| {
                grid.index_of(price).ok_or(ModelError::PriceOffGrid { product, price })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(PriceVector)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn indices_mut(&mut self) -> &mut [usize] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn price(&self, grid: &BudgetGrid, product: usize) -> Money {
        grid.value(self.0[product])
    }

    pub fn prices(&self, grid: &BudgetGrid) -> Vec<Money> {
        self.0.iter().map(|&m| grid.value(m)).collect()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

/// Renders realized prices as `(p1, p2, ...)`.
pub struct DisplayPrices<'a>(pub &'a PriceVector, pub &'a BudgetGrid);

impl fmt::Display for DisplayPrices<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (n, price) in self.0.prices(self.1).iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{price}")?;
        }
        write!(f, ")")
    }
}

/// Lower-level outcome for a price vector: what each customer buys and the
/// seller's total revenue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub chosen: Vec<Option<usize>>,
    pub revenue: Money,
}

impl Assignment {
    /// Customers buying `product`, ascending.
    pub fn buyers(&self, product: usize) -> Vec<usize> {
        self.chosen
            .iter()
            .enumerate()
            .filter_map(|(k, c)| (*c == Some(product)).then_some(k))
            .collect()
    }

    /// Number of buyers per product.
    pub fn sales(&self, num_products: usize) -> Vec<usize> {
        let mut counts = vec![0; num_products];
        for &i in self.chosen.iter().flatten() {
            counts[i] += 1;
        }
        counts
    }
}
