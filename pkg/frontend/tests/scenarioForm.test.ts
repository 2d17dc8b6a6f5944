import { describe, expect, it } from 'vitest';

import { ScenarioFormState } from '../src/scenarioForm';
import type { ColumnDescriptor } from '../src/types';

const SCHEMA: ColumnDescriptor[] = [
  { name: 'Height', unit: 'm', role: 'sampled', min: 3, max: 4 },
  { name: 'Ground_Floor_Area', unit: 'm²', role: 'sampled', min: 250, max: 800 },
  { name: 'WWR', unit: '–', role: 'derived', min: 0.1, max: 0.5 },
  { name: 'Volume', unit: 'm³', role: 'derived', min: null, max: null },
  { name: 'Heating_Load', unit: 'kWh/a', role: 'outcome', min: null, max: null },
];

function form(): ScenarioFormState {
  return new ScenarioFormState(SCHEMA);
}

describe('ScenarioFormState', () => {
  it('offers sampled parameters plus the aggregate window ratio', () => {
    const f = form();
    expect(f.treatmentChoices()).toEqual(['Height', 'Ground_Floor_Area', 'WWR']);
  });

  it('sliders clamp to their bounds', () => {
    const f = form();
    expect(f.clamp('Height', 99)).toBe(4);
    expect(f.clamp('Height', -1)).toBe(3);
    f.setCondition('Ground_Floor_Area', true, 10_000);
    expect(f.slider('Ground_Floor_Area')!.value).toBe(800);
  });

  it('treatment cannot be conditioned', () => {
    const f = form();
    f.setTreatment('Height');
    expect(() => f.setCondition('Height', true)).toThrow(/conditioned/);
  });

  it('selecting a treatment disables its previous condition', () => {
    const f = form();
    f.setCondition('Height', true, 3.5);
    f.setTreatment('Height');
    expect(f.slider('Height')!.enabled).toBe(false);
  });

  it('empty form produces validation issues and no request', () => {
    const f = form();
    const issues = f.validate();
    expect(issues.length).toBeGreaterThan(0);
    expect(f.buildRequest()).toBeNull();
  });

  it('equal arm values rejected', () => {
    const f = form();
    f.setTreatment('Height');
    f.controlValue = 3.2;
    f.treatValue = 3.2;
    expect(f.validate().some((issue) => issue.message.includes('differ'))).toBe(true);
  });

  it('valid form builds the request with only enabled conditions', () => {
    const f = form();
    f.setTreatment('Height');
    f.controlValue = 3.0;
    f.treatValue = 3.2;
    f.setCondition('Ground_Floor_Area', true, 300);
    f.setCondition('WWR', true, 0.3);
    f.nSamples = 500;
    const request = f.buildRequest();
    expect(request).toEqual({
      treatment: 'Height',
      control: 3.0,
      treat: 3.2,
      outcome: 'Heating_Load',
      conditions: { Ground_Floor_Area: 300, WWR: 0.3 },
      n_samples: 500,
    });
  });

  it('out-of-bounds treatment values flagged', () => {
    const f = form();
    f.setTreatment('Height');
    f.controlValue = 2.0;
    f.treatValue = 3.2;
    expect(f.validate().some((issue) => issue.message.includes('outside'))).toBe(true);
  });
});
