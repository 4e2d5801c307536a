/** Spawns the Python chain sim and drives its CLI for test setup. */

import { ChildProcess, execFileSync, spawn } from 'node:child_process';
import { mkdtempSync, readFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

const PYTHON = process.env.NFP_PYTHON ?? 'python3';
const CLI = ['-m', 'nfp.cli'];

export class Sim {
  readonly workdir: string;
  url = '';
  contract = '';
  accounts: Record<string, string> = {};
  private server: ChildProcess | null = null;

  constructor(prefix = 'nfp-flow-') {
    this.workdir = mkdtempSync(join(tmpdir(), prefix));
  }

  private base(remote: boolean): string[] {
    const args = [
      ...CLI,
      '--state', join(this.workdir, 'chain.jsonl'),
      '--keys', join(this.workdir, 'keys.json'),
    ];
    if (remote && this.url) args.push('--endpoint', this.url, '--contract', this.contract);
    return args;
  }

  cli(args: string[], remote = true): any {
    const out = execFileSync(PYTHON, [...this.base(remote), ...args], {
      encoding: 'utf-8',
      cwd: this.workdir,
    });
    try {
      return JSON.parse(out);
    } catch {
      return out;
    }
  }

  init(accounts: Record<string, number>, seed = 'flow-seed'): void {
    const args = ['init', '--seed', seed];
    for (const [name, balance] of Object.entries(accounts)) {
      args.push('--account', `${name}=${balance}`);
    }
    const info = this.cli(args, false);
    this.contract = info.contract;
    this.accounts = info.accounts;
  }

  keyHex(name: string): string {
    const keys = JSON.parse(readFileSync(join(this.workdir, 'keys.json'), 'utf-8'));
    if (!keys[name]) throw new Error(`no key ${name}`);
    return keys[name];
  }

  async serve(): Promise<string> {
    this.server = spawn(PYTHON, [...this.base(false), 'serve', '--port', '0'], {
      cwd: this.workdir,
      stdio: ['ignore', 'pipe', 'pipe'],
    });
    const banner: string = await new Promise((resolve, reject) => {
      let buffer = '';
      const timer = setTimeout(() => reject(new Error('serve did not start: ' + buffer)), 15000);
      this.server!.stdout!.on('data', (chunk: Buffer) => {
        buffer += chunk.toString();
        const line = buffer.split('\n').find((l) => l.includes('listening'));
        if (line) {
          clearTimeout(timer);
          resolve(line);
        }
      });
      this.server!.stderr!.on('data', (chunk: Buffer) => {
        buffer += chunk.toString();
      });
      this.server!.on('exit', (code) => {
        clearTimeout(timer);
        reject(new Error(`serve exited with ${code}: ${buffer}`));
      });
    });
    const info = JSON.parse(banner);
    this.url = info.listening;
    return this.url;
  }

  stop(): void {
    if (this.server) {
      this.server.kill('SIGINT');
      this.server = null;
    }
  }
}
