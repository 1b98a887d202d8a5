//! Mutable Chinese-restaurant-franchise state.
//!
//! Counts are maintained incrementally; [`FranchiseState::audit`] recomputes
//! everything from the seat assignments and flags drift. Empty tables and
//! unused menu pairs are removed immediately and slots compacted, so slot
//! indices are dense; identity across sweeps is carried by stable integer ids.
//! Removals return an undo record, and `restore_customer` /
//! `restore_table_dish` put the state back bit for bit.

use serde::{Deserialize, Serialize};

/// One menu pair, stored through its representative as sampled; the pair is
/// `(xi, sigma2)` and `(-xi, sigma2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DishAtom {
    pub xi: f64,
    pub sigma2: f64,
}

impl DishAtom {
    pub fn new(xi: f64, sigma2: f64) -> Self {
        assert!(sigma2 > 0.0, "sigma2 must be positive");
        DishAtom { xi, sigma2 }
    }

    pub fn negated(&self) -> DishAtom {
        DishAtom {
            xi: -self.xi,
            sigma2: self.sigma2,
        }
    }
}

/// Sentinel dish index used while a table's dish is detached.
const NO_DISH: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MenuEntry {
    pub atom: DishAtom,
    /// Number of tables franchise-wide serving this pair (`l_{.,h}`).
    pub tables: usize,
    /// Stable identity across sweeps.
    pub id: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    /// Menu slot of the pair served here.
    pub dish: usize,
    pub occupancy: usize,
    pub id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seat {
    pub table: usize,
    /// +1 for the stored representative, -1 for its mirror.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Restaurant {
    pub tables: Vec<Table>,
    /// One slot per customer; `None` only transiently during an update.
    pub seats: Vec<Option<Seat>>,
}

impl Restaurant {
    pub fn n_customers(&self) -> usize {
        self.seats.len()
    }
}

/// Where a new table's dish comes from.
#[derive(Debug, Clone)]
pub enum DishPlacement {
    Existing(usize),
    New(DishAtom),
}

/// Undo record for `remove_customer`.
#[derive(Debug, Clone)]
pub struct Removal {
    seat: Seat,
    removed_table: Option<RemovedTable>,
}

#[derive(Debug, Clone)]
struct RemovedTable {
    slot: usize,
    table: Table,
    removed_dish: Option<RemovedDish>,
}

#[derive(Debug, Clone)]
struct RemovedDish {
    slot: usize,
    entry: MenuEntry,
}

/// Undo record for `detach_table_dish`.
#[derive(Debug, Clone)]
pub struct DishDetach {
    pub dish_slot: usize,
    removed: Option<MenuEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FranchiseState {
    pub restaurants: Vec<Restaurant>,
    pub menu: Vec<MenuEntry>,
    /// Per-restaurant concentration.
    pub gamma: Vec<f64>,
    /// Menu-level concentration.
    pub alpha: f64,
    next_table_id: u64,
    next_dish_id: u64,
}

impl FranchiseState {
    /// Empty franchise with `sizes[j]` unseated customers per restaurant.
    pub fn new(gamma: Vec<f64>, alpha: f64, sizes: &[usize]) -> Self {
        assert_eq!(gamma.len(), sizes.len());
        assert!(alpha > 0.0 && gamma.iter().all(|&g| g > 0.0));
        FranchiseState {
            restaurants: sizes
                .iter()
                .map(|&n| Restaurant {
                    tables: Vec::new(),
                    seats: vec![None; n],
                })
                .collect(),
            menu: Vec::new(),
            gamma,
            alpha,
            next_table_id: 0,
            next_dish_id: 0,
        }
    }

    pub fn n_restaurants(&self) -> usize {
        self.restaurants.len()
    }

    /// Total number of tables franchise-wide (`|l|`).
    pub fn total_tables(&self) -> usize {
        self.restaurants.iter().map(|r| r.tables.len()).sum()
    }

    pub fn n_dishes(&self) -> usize {
        self.menu.len()
    }

    /// Tables-per-dish counts recomputed from scratch, `[restaurant][menu slot]`.
    pub fn ell_by_restaurant(&self) -> Vec<Vec<usize>> {
        let mut ell = vec![vec![0usize; self.menu.len()]; self.restaurants.len()];
        for (j, r) in self.restaurants.iter().enumerate() {
            for t in &r.tables {
                ell[j][t.dish] += 1;
            }
        }
        ell
    }

    pub fn customers_at(&self, j: usize, t: usize) -> Vec<usize> {
        self.restaurants[j]
            .seats
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Some(seat) if seat.table == t => Some(i),
                _ => None,
            })
            .collect()
    }

    /// Seats customer `(j, i)` at an existing table.
    pub fn seat_existing<R: Into<i8>>(&mut self, j: usize, i: usize, table: usize, sign: R) {
        let sign = sign.into();
        debug_assert!(sign == 1 || sign == -1);
        let r = &mut self.restaurants[j];
        debug_assert!(r.seats[i].is_none(), "customer already seated");
        r.tables[table].occupancy += 1;
        r.seats[i] = Some(Seat { table, sign });
    }

    /// Opens a new table for customer `(j, i)`; returns its slot.
    pub fn seat_new_table(
        &mut self,
        j: usize,
        i: usize,
        placement: DishPlacement,
        sign: i8,
    ) -> usize {
        debug_assert!(sign == 1 || sign == -1);
        let dish = match placement {
            DishPlacement::Existing(h) => {
                self.menu[h].tables += 1;
                h
            }
            DishPlacement::New(atom) => {
                self.menu.push(MenuEntry {
                    atom,
                    tables: 1,
                    id: self.next_dish_id,
                });
                self.next_dish_id += 1;
                self.menu.len() - 1
            }
        };
        let r = &mut self.restaurants[j];
        debug_assert!(r.seats[i].is_none(), "customer already seated");
        r.tables.push(Table {
            dish,
            occupancy: 1,
            id: self.next_table_id,
        });
        self.next_table_id += 1;
        let slot = r.tables.len() - 1;
        r.seats[i] = Some(Seat { table: slot, sign });
        slot
    }

    /// Detaches customer `(j, i)`, dropping its table (and the table's menu
    /// pair) if left empty. Slots after a removed one shift down; seat and
    /// dish references are adjusted.
    pub fn remove_customer(&mut self, j: usize, i: usize) -> Removal {
        let seat = self.restaurants[j].seats[i]
            .take()
            .expect("customer not seated");
        let slot = seat.table;
        let r = &mut self.restaurants[j];
        r.tables[slot].occupancy -= 1;
        if r.tables[slot].occupancy > 0 {
            return Removal {
                seat,
                removed_table: None,
            };
        }
        let table = r.tables.remove(slot);
        for s in r.seats.iter_mut().flatten() {
            if s.table > slot {
                s.table -= 1;
            }
        }
        let d = table.dish;
        self.menu[d].tables -= 1;
        let removed_dish = if self.menu[d].tables == 0 {
            let entry = self.menu.remove(d);
            for rest in &mut self.restaurants {
                for t in &mut rest.tables {
                    if t.dish != NO_DISH && t.dish > d {
                        t.dish -= 1;
                    }
                }
            }
            Some(RemovedDish { slot: d, entry })
        } else {
            None
        };
        Removal {
            seat,
            removed_table: Some(RemovedTable {
                slot,
                table,
                removed_dish,
            }),
        }
    }

    /// Exact inverse of [`remove_customer`].
    pub fn restore_customer(&mut self, j: usize, i: usize, removal: Removal) {
        if let Some(rt) = removal.removed_table {
            if let Some(rd) = rt.removed_dish {
                for rest in &mut self.restaurants {
                    for t in &mut rest.tables {
                        if t.dish != NO_DISH && t.dish >= rd.slot {
                            t.dish += 1;
                        }
                    }
                }
                self.menu.insert(rd.slot, rd.entry);
            }
            let r = &mut self.restaurants[j];
            for s in r.seats.iter_mut().flatten() {
                if s.table >= rt.slot {
                    s.table += 1;
                }
            }
            let dish = rt.table.dish;
            r.tables.insert(rt.slot, rt.table);
            self.menu[dish].tables += 1;
        }
        let r = &mut self.restaurants[j];
        debug_assert!(r.seats[i].is_none());
        r.tables[removal.seat.table].occupancy += 1;
        r.seats[i] = Some(removal.seat);
    }

    /// Removes table `(j, t)`'s dish from the menu counts ahead of a dish
    /// update. The table keeps a sentinel until `attach_table_dish` or
    /// `restore_table_dish`.
    pub fn detach_table_dish(&mut self, j: usize, t: usize) -> DishDetach {
        let d = self.restaurants[j].tables[t].dish;
        assert_ne!(d, NO_DISH, "dish already detached");
        self.restaurants[j].tables[t].dish = NO_DISH;
        self.menu[d].tables -= 1;
        let removed = if self.menu[d].tables == 0 {
            let entry = self.menu.remove(d);
            for rest in &mut self.restaurants {
                for tb in &mut rest.tables {
                    if tb.dish != NO_DISH && tb.dish > d {
                        tb.dish -= 1;
                    }
                }
            }
            Some(entry)
        } else {
            None
        };
        DishDetach {
            dish_slot: d,
            removed,
        }
    }

    pub fn attach_table_dish(&mut self, j: usize, t: usize, placement: DishPlacement) {
        debug_assert_eq!(self.restaurants[j].tables[t].dish, NO_DISH);
        let dish = match placement {
            DishPlacement::Existing(h) => {
                self.menu[h].tables += 1;
                h
            }
            DishPlacement::New(atom) => {
                self.menu.push(MenuEntry {
                    atom,
                    tables: 1,
                    id: self.next_dish_id,
                });
                self.next_dish_id += 1;
                self.menu.len() - 1
            }
        };
        self.restaurants[j].tables[t].dish = dish;
    }

    /// Exact inverse of [`detach_table_dish`].
    pub fn restore_table_dish(&mut self, j: usize, t: usize, detach: DishDetach) {
        debug_assert_eq!(self.restaurants[j].tables[t].dish, NO_DISH);
        if let Some(entry) = detach.removed {
            for rest in &mut self.restaurants {
                for tb in &mut rest.tables {
                    if tb.dish != NO_DISH && tb.dish >= detach.dish_slot {
                        tb.dish += 1;
                    }
                }
            }
            self.menu.insert(detach.dish_slot, entry);
        }
        self.menu[detach.dish_slot].tables += 1;
        self.restaurants[j].tables[t].dish = detach.dish_slot;
    }

    /// Full recount of every incrementally maintained invariant.
    pub fn audit(&self, sizes: &[usize]) -> Result<(), String> {
        if sizes.len() != self.restaurants.len() {
            return Err("restaurant count mismatch".into());
        }
        let mut menu_tables = vec![0usize; self.menu.len()];
        for (j, r) in self.restaurants.iter().enumerate() {
            if r.seats.len() != sizes[j] {
                return Err(format!("restaurant {j}: seat count mismatch"));
            }
            let mut occ = vec![0usize; r.tables.len()];
            for (i, s) in r.seats.iter().enumerate() {
                match s {
                    None => return Err(format!("restaurant {j}: customer {i} unseated")),
                    Some(seat) => {
                        if seat.table >= r.tables.len() {
                            return Err(format!("restaurant {j}: seat {i} table out of range"));
                        }
                        if seat.sign != 1 && seat.sign != -1 {
                            return Err(format!("restaurant {j}: seat {i} invalid sign"));
                        }
                        occ[seat.table] += 1;
                    }
                }
            }
            for (t, table) in r.tables.iter().enumerate() {
                if table.occupancy != occ[t] {
                    return Err(format!(
                        "restaurant {j} table {t}: occupancy {} vs recount {}",
                        table.occupancy, occ[t]
                    ));
                }
                if table.occupancy == 0 {
                    return Err(format!("restaurant {j} table {t}: empty table retained"));
                }
                if table.dish == NO_DISH || table.dish >= self.menu.len() {
                    return Err(format!("restaurant {j} table {t}: dangling dish"));
                }
                menu_tables[table.dish] += 1;
            }
        }
        for (h, entry) in self.menu.iter().enumerate() {
            if entry.tables != menu_tables[h] {
                return Err(format!(
                    "menu {h}: table count {} vs recount {}",
                    entry.tables, menu_tables[h]
                ));
            }
            if entry.tables == 0 {
                return Err(format!("menu {h}: unused pair retained"));
            }
            if !(entry.atom.sigma2 > 0.0) {
                return Err(format!("menu {h}: non-positive variance"));
            }
        }
        Ok(())
    }
}
