/** Client-side board validation, mirroring the contract's rules exactly.
 *
 * The differential test in test/validate.test.ts holds this to the
 * contract's verdict on fuzzed inputs; treat any divergence as a client
 * bug, never as a reason to relax a rule here.
 */

export const GRID = 10;

export const VEHICLES: Record<string, number> = {
  carrier: 5,
  battleship: 4,
  cruiser: 3,
  submarine: 3,
  destroyer: 2,
};

export interface Placement {
  vehicle_type: string;
  origin: [number, number];
  orientation: 'horizontal' | 'vertical';
}

export interface ValidationResult {
  ok: boolean;
  error?: string;
  cells?: Map<string, string>;
}

export function validatePlacements(placements: unknown): ValidationResult {
  if (!Array.isArray(placements) || placements.length !== Object.keys(VEHICLES).length) {
    return { ok: false, error: `exactly ${Object.keys(VEHICLES).length} placements required` };
  }
  const seen = new Set<string>();
  const cells = new Map<string, string>();
  for (const item of placements) {
    if (typeof item !== 'object' || item === null || Array.isArray(item)) {
      return { ok: false, error: 'placement must be an object' };
    }
    const p = item as Record<string, unknown>;
    const vtype = p.vehicle_type as string;
    if (!(vtype in VEHICLES)) return { ok: false, error: `unknown vehicle type ${vtype}` };
    if (seen.has(vtype)) return { ok: false, error: `duplicate vehicle type ${vtype}` };
    seen.add(vtype);
    const origin = p.origin;
    if (
      !Array.isArray(origin) ||
      origin.length !== 2 ||
      !origin.every((v) => typeof v === 'number' && Number.isInteger(v))
    ) {
      return { ok: false, error: 'origin must be [x, y] integers' };
    }
    const orientation = p.orientation;
    if (orientation !== 'horizontal' && orientation !== 'vertical') {
      return { ok: false, error: 'orientation must be horizontal or vertical' };
    }
    const [x, y] = origin as [number, number];
    const [dx, dy] = orientation === 'horizontal' ? [1, 0] : [0, 1];
    for (let i = 0; i < VEHICLES[vtype]; i++) {
      const cx = x + dx * i;
      const cy = y + dy * i;
      if (cx < 0 || cx >= GRID || cy < 0 || cy >= GRID) {
        return { ok: false, error: `${vtype} extends outside the grid` };
      }
      const key = `${cx},${cy}`;
      if (cells.has(key)) return { ok: false, error: `placements overlap at (${cx},${cy})` };
      cells.set(key, vtype);
    }
  }
  return { ok: true, cells };
}
